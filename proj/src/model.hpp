#pragma once

// BHZ Bloch Hamiltonian, its closed-form spectrum, the ky-derivative used by
// the generalized force, and the microwave (lab / rotating frame) realization.
//
// Basis order everywhere: {|+,E1>, |+,H1>, |-,E1>, |-,H1>}.
// Energies are in units of A; time in units of 1/A.

#include <array>

#include "brillouin.hpp"
#include "linalg.hpp"

namespace bhz {

using linalg::Complex;
using linalg::Matrix2;
using linalg::Matrix4;
using Vec3 = std::array<double, 3>;

struct ModelParams {
  double A = 1.0;
  double B = 1.0;
  double M = 2.0;
  double g = 0.0;

  /// Throws Error(InvalidInput) unless A > 0, g >= 0 and all values finite.
  void validate() const;

  /// Parameter point addressed as (M/2B, g/A) with the given A and B.
  static ModelParams from_ratios(double m_over_2b, double g_over_a, double A = 1.0, double B = 1.0);
};

struct CoefficientPair {
  Vec3 plus;   // (A sin kx, -A sin ky, M(k))
  Vec3 minus;  // (-A sin kx, -A sin ky, M(k))
};

/// M(k) = M - 2B (2 - cos kx - cos ky)
double mass_term(const ModelParams& p, const Momentum& k) noexcept;

CoefficientPair coefficients(const ModelParams& p, const Momentum& k) noexcept;

Matrix2 pauli_x() noexcept;
Matrix2 pauli_y() noexcept;
Matrix2 pauli_z() noexcept;

/// B . sigma
Matrix2 block_hamiltonian(const Vec3& b) noexcept;

/// [[H+, g sigma_x], [g sigma_x, H-]]
Matrix4 hamiltonian(const ModelParams& p, const Momentum& k) noexcept;

/// (E1, E1, -E1, -E1) with E1 = -sqrt(|B|^2 + g^2), ascending.
std::array<double, 4> eigenvalues_closed_form(const ModelParams& p, const Momentum& k) noexcept;

struct GapReport {
  double value = 0.0;
  Momentum where;
};

/// min over the grid of 2 sqrt(|B|^2 + g^2), with its arg-min.
GapReport energy_gap(const ModelParams& p, const BZGrid& grid);

struct GammaMatrices {
  Matrix4 x;
  Matrix4 y;
  Matrix4 z;
};

/// Gamma_x = blockdiag(sx, sx); Gamma_y = blockdiag([[0,i],[-i,0]] x2);
/// Gamma_z = diag(1,-1,1,-1). Note Gamma_y = -blockdiag(sy, sy).
GammaMatrices gamma_matrices() noexcept;

/// dH/dky = A cos ky Gamma_y - 2B sin ky Gamma_z.
Matrix4 dky_hamiltonian(const ModelParams& p, const Momentum& k) noexcept;

// ---------------------------------------------------------------------------
// Microwave realization

struct Tone {
  double rabi = 0.0;      // Omega_k
  double detuning = 0.0;  // Delta_k
  double phase = 0.0;     // phi_k
};

/// Four-tone drive of the four-level atom. Tone 1 couples |+E>-|+H>, tone 2
/// |-E>-|-H>, tone 3 |+E>-|-H> and tone 4 |-E>-|+H>. Carrier frequencies are
/// derived from the level frequencies and detunings so the two never disagree.
struct MicrowaveParams {
  std::array<Tone, 4> tones{};
  double level_plus_e = 0.0;
  double level_plus_h = 0.0;
  double level_minus_e = 0.0;
  double level_minus_h = 0.0;

  /// Bare transition frequency addressed by tone k (1-based).
  double transition(int k) const;
  /// omega_k = Delta_k + transition(k)
  double carrier(int k) const;
  /// Delta' = Delta1 + Delta2 - Delta3 - Delta4
  double closure() const noexcept;
};

/// Lab-frame (bare basis) Hamiltonian with level energies measured from
/// |+,H1>. Each tone contributes (Omega_k/2) e^{-i(omega_k t + phi_k)} on
/// |upper><lower| plus its Hermitian conjugate.
Matrix4 lab_frame_hamiltonian(const MicrowaveParams& mw, double t) noexcept;

/// Time-independent Hamiltonian in the frame co-rotating with the carriers:
///
///   (1/2) [[-D1,      W1 e^-ip1, 0,         W3 e^-ip3],
///          [W1 e^ip1, D1,        W4 e^ip4,  0        ],
///          [0,        W4 e^-ip4, -D2,       W2 e^-ip2],
///          [W3 e^ip3, 0,         W2 e^ip2,  D2       ]]  + (D3-D4)/2 on S-
///
/// Throws Error(ClosureViolation) when |Delta'| > 1e-12.
Matrix4 rotating_frame_hamiltonian(const MicrowaveParams& mw);

/// Diagonal W(t) with psi_lab(t) = W(t) psi_rot(t), including the global
/// phase that the constant energy offset between the frames produces.
Matrix4 frame_unitary(const MicrowaveParams& mw, double t);

/// Microwaves whose rotating-frame Hamiltonian equals hamiltonian(p, k) / 2.
/// Level splittings are synthetic, scaled by `synthetic_carrier_scale` (>= 10).
MicrowaveParams model_to_microwaves(const ModelParams& p, const Momentum& k, double synthetic_carrier_scale);

}  // namespace bhz
