#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "config.hpp"

namespace bhzcli {

/// A numerical precondition failed inside the library (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int cmd_ulink(const RunConfig& cfg, std::ostream& log);
int cmd_lr(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_tomography(const RunConfig& cfg, std::ostream& log);
int cmd_frames_check(const RunConfig& cfg, std::ostream& log);

/// Dispatches by subcommand name and maps exceptions to exit codes.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace bhzcli
