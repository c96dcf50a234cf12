#pragma once

// Driven kx sweep, pseudospin projections, generalized force and the
// linear-response Berry curvature estimate of the spin Chern number.

#include <functional>
#include <vector>

#include "invariants.hpp"
#include "model.hpp"

namespace bhz {

using linalg::Vector2;
using linalg::Vector4;

enum class ReferenceMode {
  Adiabatic,      // force on the instantaneous spin-split occupied state
  Initial,        // force on the spin-split state at kx = -pi, held fixed
  PaperConstant,  // 4B sin ky
};

const char* to_string(ReferenceMode mode) noexcept;

enum class Sector { Plus, Minus };

/// kx(t) = v t - pi over t in [0, T], v = 2 pi / T, T = omega_t_over_pi * pi / A.
/// Snapshots are taken at the midpoints of meas_count equal segments, so
/// steps must be a multiple of 2 * meas_count.
struct SweepProtocol {
  double ky = 0.0;
  double omega_t_over_pi = 24.0;
  int steps = 4800;
  int meas_count = 60;

  /// Throws Error(InvalidInput) on a malformed protocol.
  void validate() const;
  double duration(double A) const noexcept { return omega_t_over_pi * kPi / A; }
  double velocity(double A) const noexcept { return kTwoPi / duration(A); }
};

/// Substep count that keeps the default 200 substeps per pi of omega T,
/// rounded up to a multiple of 2 * meas_count.
int default_steps(double omega_t_over_pi, int meas_count);

/// psi_plus + psi_minus of the spin-split pair at (-pi, ky); norm^2 = 2.
Vector4 prepare_initial_state(const ModelParams& p, double ky, double gap_floor = kDefaultGapFloor);

struct Snapshot {
  double t = 0.0;
  Vector4 psi;
};

/// Fourth-order Magnus stepping of psi under h(t): each substep is one exact
/// exponential of the two-node Gauss-Legendre generator (see magnus4_step).
/// Snapshots at t_j = (j + 1/2) T / meas_count.
/// Throws Error(IntegratorFailure) if |psi|^2 drifts by more than 1e-6.
std::vector<Snapshot> propagate_schedule(const std::function<Matrix4(double)>& h, double duration, int steps,
                                         int meas_count, const Vector4& psi0);

std::vector<Snapshot> propagate(const ModelParams& p, const SweepProtocol& protocol, const Vector4& psi0);

/// Amplitudes of block S_tau, not renormalized.
Vector2 project_pseudospin(const Vector4& psi, Sector tau) noexcept;

/// (eta^dag sx eta, eta^dag sy eta, eta^dag sz eta), not renormalized.
Vec3 bloch_expectations(const Vector2& eta) noexcept;

/// A cos ky <sy> + 2B sin ky <sz>
double generalized_force(const ModelParams& p, double ky, const Vec3& bloch) noexcept;

/// Reference force f0 for one sector at momentum k.
double adiabatic_reference(const ModelParams& p, const Momentum& k, Sector tau, ReferenceMode mode,
                           double gap_floor = kDefaultGapFloor);

struct CurvatureSample {
  double kx = 0.0;
  double ky = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;
  double f_s = 0.0;
};

struct CurvatureMap {
  std::vector<CurvatureSample> samples;
  double omega_t_over_pi = 0.0;
  ReferenceMode mode = ReferenceMode::Adiabatic;

  void append(const CurvatureMap& other);
};

/// Centered boxcar over the snapshot sequence; window <= 1 is a no-op.
void smooth_boxcar(std::vector<double>& values, int window);

/// F_tau = (f_tau - f0_tau) / v along one ky line.
CurvatureMap berry_curvature_lr(const ModelParams& p, const SweepProtocol& protocol,
                                ReferenceMode mode = ReferenceMode::Adiabatic, int smoothing_window = 1,
                                double gap_floor = kDefaultGapFloor);

/// n lines -pi + 2 pi q / (n - 1), q = 0..n-1, both zone edges included.
std::vector<double> ky_line_set(int n);

struct ChernEstimate {
  double c_plus = 0.0;
  double c_minus = 0.0;
  double c_s = 0.0;
};

/// Trapezoid rule over the sampled lattice. kx samples must be uniform and
/// periodic on every line; ky lines must be uniform and either include both
/// zone edges (half weight at the ends) or be periodic.
/// C_tau = (1/2pi) sum F_tau dkx dky and C_s = (C+ - C-)/2.
/// Throws Error(InvalidInput) on non-uniform sampling.
ChernEstimate integrate_curvature(const CurvatureMap& map);

struct LrResult {
  CurvatureMap map;
  ChernEstimate estimate;
};

/// Runs one line per ky value (in parallel) and integrates.
LrResult lr_spin_chern(const ModelParams& p, const SweepProtocol& base, const std::vector<double>& ky_lines,
                       ReferenceMode mode = ReferenceMode::Adiabatic, int smoothing_window = 1, int workers = 1,
                       double gap_floor = kDefaultGapFloor);

// ---------------------------------------------------------------------------
// Lab frame vs rotating frame

/// One fourth-order Magnus step for a time-dependent generator.
Matrix4 magnus4_step(const std::function<Matrix4(double)>& h, double t, double dt);

struct FrameCheckOptions {
  double duration = 4.0 * kPi;
  int steps = 0;  // 0 selects a step count from the largest carrier
  int checkpoints = 16;
};

struct FrameCheckReport {
  double max_population_deviation = 0.0;
  double max_state_deviation = 0.0;
  double max_model_deviation = -1.0;  // vs exp(-i H t/2); negative when not applicable
  int steps = 0;
  bool pass = false;
};

inline constexpr double kFrameTolerance = 1e-6;

/// Integrates the lab-frame Hamiltonian, maps back with the frame unitary and
/// compares with exact rotating-frame evolution at each checkpoint.
FrameCheckReport frame_equivalence_check(const MicrowaveParams& mw, const Vector4& psi0,
                                         const FrameCheckOptions& options = {});

/// Same, for the microwaves realizing (p, k); additionally compares against
/// BHZ evolution over half the elapsed time.
FrameCheckReport frame_equivalence_check(const ModelParams& p, const Momentum& k, double carrier_scale,
                                         const Vector4& psi0, const FrameCheckOptions& options = {});

}  // namespace bhz
