#pragma once

// Occupied-band projection, projected spin matrix, spin-resolved states and
// the U-link (plaquette) evaluation of C+, C- and the spin Chern number.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "brillouin.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace bhz {

using linalg::Vector4;

inline constexpr double kDefaultGapFloor = 1e-6;
inline constexpr double kLinkFloor = 1e-8;

struct OccupiedPair {
  Vector4 phi1;
  Vector4 phi2;
  double energy = 0.0;  // lowest (doubly degenerate) eigenvalue
  double gap = 0.0;     // E3 - E1
};

/// Orthonormal basis of the two lowest bands, in whatever gauge the
/// eigensolver produces. Throws Error(EnergyGapClosed) with the k-point when
/// E3 - E1 < gap_floor.
OccupiedPair occupied_states(const ModelParams& p, const Momentum& k, double gap_floor = kDefaultGapFloor);

enum class SpinOperator {
  Pseudospin,  // diag(1, 1, -1, -1)
  Orbital,     // diag(1, -1, 1, -1), the literal I (x) sigma_z reading
};

Matrix4 spin_operator(SpinOperator which) noexcept;

/// H^s_jl = <phi_j| S |phi_l>
Matrix2 spin_matrix(const Vector4& phi1, const Vector4& phi2, const Matrix4& op);
Matrix2 spin_matrix(const Vector4& phi1, const Vector4& phi2);

struct SpinSplitPair {
  Vector4 psi_plus;
  Vector4 psi_minus;
  double spin_plus = 0.0;   // larger eigenvalue of H^s
  double spin_minus = 0.0;
  double occupied_energy = 0.0;

  double spin_gap() const noexcept { return spin_plus - spin_minus; }
};

/// Diagonalizes the projected spin matrix of an occupied pair. Each output
/// state has its largest-modulus component made real and positive.
/// Throws Error(SpinGapClosed) when the splitting is below gap_floor.
SpinSplitPair spin_split(const OccupiedPair& occ, const Momentum& k, SpinOperator op = SpinOperator::Pseudospin,
                         double gap_floor = kDefaultGapFloor);
SpinSplitPair spin_split(const ModelParams& p, const Momentum& k, SpinOperator op = SpinOperator::Pseudospin,
                         double gap_floor = kDefaultGapFloor);

/// Spin splitting without the gap-floor check (it may be zero).
double spin_splitting(const OccupiedPair& occ, SpinOperator op = SpinOperator::Pseudospin);

struct SpinGapReport {
  double value = 0.0;
  Momentum where;
};

/// Minimum spin splitting over the grid. Closed energy gaps propagate.
SpinGapReport spin_gap(const ModelParams& p, const BZGrid& grid, SpinOperator op = SpinOperator::Pseudospin,
                       double gap_floor = kDefaultGapFloor);

/// Arg(U1 U2 U3 U4) for corners ordered (r,n), (r+1,n), (r+1,n+1), (r,n+1).
/// Throws Error(IllConditionedLink) when any overlap modulus is < 1e-8.
double ulink_field_strength(const std::array<Vector4, 4>& corners);

/// Random U(2) mixing of the occupied pair, deterministic in (seed, index).
std::array<Vector4, 2> scramble_pair(const Vector4& phi1, const Vector4& phi2, std::uint64_t seed, std::uint64_t index);

struct ChernOptions {
  double gap_floor = kDefaultGapFloor;
  std::optional<std::uint64_t> scramble_seed;
  SpinOperator op = SpinOperator::Pseudospin;
  int workers = 1;
};

/// Per-plaquette field strengths, indexed like BZGrid::index(r, n) for the
/// plaquette whose lower-left corner is (r, n).
struct FieldMap {
  int R = 0;
  int N = 0;
  std::vector<double> plus;
  std::vector<double> minus;
  double delta_s = 0.0;
  Momentum delta_s_where;
  double delta_cv = 0.0;
  Momentum delta_cv_where;
};

FieldMap ulink_field_map(const ModelParams& p, const BZGrid& grid, const ChernOptions& options = {});

struct InvariantRecord {
  double c_plus = 0.0;
  double c_minus = 0.0;
  double c_s = 0.0;
  double delta_s = 0.0;
  double delta_cv = 0.0;
  int grid_R = 0;
  int grid_N = 0;
};

/// C_tau = (1/2pi) sum F_tau, C_s = (C+ - C-)/2. The plaquette sum runs in
/// fixed index order, so the result does not depend on the worker count.
InvariantRecord spin_chern(const ModelParams& p, const BZGrid& grid, const ChernOptions& options = {});

}  // namespace bhz
