#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhzcli {

/// Malformed or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  double A = 1.0;
  double B = 1.0;
  double M = 2.0;
  double g = 0.0;
};

struct GridConfig {
  int R = 60;
  int N = 60;
};

struct ProtocolConfig {
  double omega_t_over_pi = 24.0;
  int steps = 0;  // 0: 200 substeps per pi of omega T
  int meas_count = 60;
  int ky_lines = 11;
  double ky = 0.0;
  int smoothing_window = 1;
};

struct SweepConfig {
  std::vector<double> m_over_2b_values;
  std::vector<double> g_over_a_values;
  std::vector<double> omega_t_over_pi_values;
};

struct FramesConfig {
  double carrier_scale = 50.0;
  double kx = 0.3;
  double ky = -0.7;
  double duration = 12.566370614359172;  // 4 pi
  int steps = 0;
  int checkpoints = 16;
  double closure_offset = 0.0;  // added to the tone-4 detuning
};

enum class ReferenceModeConfig { Adiabatic, Initial, PaperConstant };

struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  ProtocolConfig protocol;
  ReferenceModeConfig reference_mode = ReferenceModeConfig::Adiabatic;
  double gap_floor = 1e-6;
  SweepConfig sweep;
  FramesConfig frames;
  std::string output_path;
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

/// Parses JSON text. `source` names the input in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

const char* to_string(ReferenceModeConfig mode) noexcept;

}  // namespace bhzcli
