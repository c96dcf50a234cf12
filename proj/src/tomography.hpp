#pragma once

// Noiseless simulation of the population-measurement pipeline: pi swaps,
// population unfolding, pi/2 analysis pulses and the lab -> rotating frame
// correction.

#include <array>
#include <vector>

#include "dynamics.hpp"

namespace bhz {

struct PopulationQuad {
  double plus_e = 0.0;
  double plus_h = 0.0;
  double minus_e = 0.0;
  double minus_h = 0.0;

  double sum() const noexcept { return plus_e + plus_h + minus_e + minus_h; }
};

inline constexpr double kStateNormTolerance = 1e-8;
inline constexpr double kPopulationSlack = 1e-9;

/// |psi_i|^2 in basis order. Throws Error(InvalidInput) unless |psi|^2 = 2.
PopulationQuad measure_populations(const Vector4& psi);

struct ProjectiveCounts {
  double z1 = 0.0;  // P+E + P-E
  double z2 = 0.0;  // P+H + P-E, after a pi swap |+E> <-> |+H>
  double z3 = 0.0;  // P-E + P-H, after a pi swap |+E> <-> |-H>
};

/// exp(-i (pi/2) sigma_x) on levels (a, b), identity elsewhere.
Matrix4 pi_pulse(std::size_t a, std::size_t b) noexcept;

ProjectiveCounts projective_sequence(const Vector4& psi);

/// Inverts the three sums plus the total of 2. Throws Error(InconsistentData)
/// when a recovered population leaves [-1e-9, 2 + 1e-9].
PopulationQuad solve_populations(double z1, double z2, double z3);

/// Blockwise pi/2 analysis pulses: chi_x(+-) = exp(-+i (pi/4) sigma_x), same for y.
enum class AnalysisPulse { XPlus, XMinus, YPlus, YMinus };
Matrix4 analysis_pulse(AnalysisPulse pulse) noexcept;

/// Per-sector (x', y', z') with z' = 2 P_{tau,E} - 1; x' and y' are half the
/// difference of z' after the opposite pi/2 pulses.
std::array<Vec3, 2> reconstruct_bloch(const Vector4& psi);

/// Direct block expectations expressed in the z' = 2 P_E - 1 convention:
/// z' = <sz> + (|eta|^2 - 1); x and y are unchanged.
Vec3 to_population_convention(const Vec3& direct, double block_norm2) noexcept;

/// Rotation about z by phi0: (x cos - y sin, x sin + y cos, z).
Vec3 frame_rotation(const Vec3& bloch, double phi0) noexcept;

/// Cumulative phi0(t_i) = int_0^{t_i} Bz(kx(t), ky) dt on the substep nodes
/// t_i = i T / steps (trapezoid rule), i = 0..steps.
std::vector<double> frame_angles(const ModelParams& p, const SweepProtocol& protocol);

/// phi0 at t = T.
double frame_angle(const ModelParams& p, const SweepProtocol& protocol);

/// Lab-frame state: blockdiag(exp(i phi0 sz / 2)) applied to the rotating one.
Vector4 to_lab_frame(const Vector4& psi_rot, double phi0) noexcept;

struct TomographyRow {
  double t = 0.0;
  double kx = 0.0;
  int tau = 1;
  Vec3 direct{};
  Vec3 pipeline{};
  double block_norm = 0.0;  // |eta_tau|^2
  double residual = 0.0;    // max component difference
};

/// Propagates one ky line and runs every snapshot through the lab-frame
/// measurement pipeline and back, next to the direct rotating-frame values.
std::vector<TomographyRow> tomography_trace(const ModelParams& p, const SweepProtocol& protocol,
                                            double gap_floor = kDefaultGapFloor);

}  // namespace bhz
