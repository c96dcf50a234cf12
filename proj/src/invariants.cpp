#include "invariants.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace bhz {

namespace {

using linalg::Complex;
using linalg::Vector4;

KPoint to_kpoint(const Momentum& k) { return {k.kx(), k.ky()}; }

Vector4 combine(Complex a, const Vector4& x, Complex b, const Vector4& y) {
  Vector4 out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

// Makes the largest-modulus component real and positive.
void fix_gauge(Vector4& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  const double m = std::abs(v[best]);
  if (m == 0.0) return;
  const Complex phase = std::conj(v[best]) / m;
  for (auto& x : v) x *= phase;
  v[best] = m;
}

struct PointStates {
  Vector4 plus;
  Vector4 minus;
  double spin_gap = 0.0;
  double energy_gap = 0.0;
};

}  // namespace

OccupiedPair occupied_states(const ModelParams& p, const Momentum& k, double gap_floor) {
  const auto es = linalg::hermitian_eigh(hamiltonian(p, k));
  const double gap = es.values[2] - es.values[0];
  if (!(gap >= gap_floor)) {
    std::ostringstream os;
    os << "energy gap closed at k = (" << k.kx() << ", " << k.ky() << "): E3 - E1 = " << gap << " < " << gap_floor;
    throw Error(ErrorKind::EnergyGapClosed, os.str(), to_kpoint(k));
  }
  std::array<Vector4, 2> basis{es.vector(0), es.vector(1)};
  linalg::orthonormalize(std::span<Vector4>(basis));
  return {basis[0], basis[1], 0.5 * (es.values[0] + es.values[1]), gap};
}

Matrix4 spin_operator(SpinOperator which) noexcept {
  if (which == SpinOperator::Orbital) return Matrix4::diagonal({1.0, -1.0, 1.0, -1.0});
  return Matrix4::diagonal({1.0, 1.0, -1.0, -1.0});
}

Matrix2 spin_matrix(const Vector4& phi1, const Vector4& phi2, const Matrix4& op) {
  const std::array<const Vector4*, 2> phi{&phi1, &phi2};
  Matrix2 hs;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t l = 0; l < 2; ++l) hs(j, l) = linalg::inner(*phi[j], op * *phi[l]);
  // Exact Hermitian symmetry; the raw entries differ only by rounding.
  hs(0, 0) = hs(0, 0).real();
  hs(1, 1) = hs(1, 1).real();
  hs(1, 0) = std::conj(hs(0, 1));
  return hs;
}

Matrix2 spin_matrix(const Vector4& phi1, const Vector4& phi2) {
  return spin_matrix(phi1, phi2, spin_operator(SpinOperator::Pseudospin));
}

double spin_splitting(const OccupiedPair& occ, SpinOperator op) {
  const auto es = linalg::hermitian_eigh(spin_matrix(occ.phi1, occ.phi2, spin_operator(op)));
  return es.values[1] - es.values[0];
}

SpinSplitPair spin_split(const OccupiedPair& occ, const Momentum& k, SpinOperator op, double gap_floor) {
  const auto es = linalg::hermitian_eigh(spin_matrix(occ.phi1, occ.phi2, spin_operator(op)));
  const double split = es.values[1] - es.values[0];
  if (!(split >= gap_floor)) {
    std::ostringstream os;
    os << "spin gap closed at k = (" << k.kx() << ", " << k.ky() << "): E+ - E- = " << split << " < " << gap_floor;
    throw Error(ErrorKind::SpinGapClosed, os.str(), to_kpoint(k));
  }
  SpinSplitPair out;
  out.spin_plus = es.values[1];
  out.spin_minus = es.values[0];
  out.occupied_energy = occ.energy;
  out.psi_plus = combine(es.vectors(0, 1), occ.phi1, es.vectors(1, 1), occ.phi2);
  out.psi_minus = combine(es.vectors(0, 0), occ.phi1, es.vectors(1, 0), occ.phi2);
  fix_gauge(out.psi_plus);
  fix_gauge(out.psi_minus);
  return out;
}

SpinSplitPair spin_split(const ModelParams& p, const Momentum& k, SpinOperator op, double gap_floor) {
  return spin_split(occupied_states(p, k, gap_floor), k, op, gap_floor);
}

SpinGapReport spin_gap(const ModelParams& p, const BZGrid& grid, SpinOperator op, double gap_floor) {
  SpinGapReport best{std::numeric_limits<double>::infinity(), {}};
  for (int r = 0; r < grid.R(); ++r)
    for (int n = 0; n < grid.N(); ++n) {
      const Momentum k = grid.point(r, n);
      const double s = spin_splitting(occupied_states(p, k, gap_floor), op);
      if (s < best.value) best = {s, k};
    }
  return best;
}

double ulink_field_strength(const std::array<Vector4, 4>& corners) {
  Complex product = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Complex overlap = linalg::inner(corners[i], corners[(i + 1) % 4]);
    const double m = std::abs(overlap);
    if (!(m >= kLinkFloor)) {
      std::ostringstream os;
      os << "ill-conditioned U-link: |<psi|psi'>| = " << m << " on link " << i + 1
         << "; the states change too fast between neighbours, refine the grid";
      throw Error(ErrorKind::IllConditionedLink, os.str());
    }
    product *= overlap / m;
  }
  return std::arg(product);
}

std::array<Vector4, 2> scramble_pair(const Vector4& phi1, const Vector4& phi2, std::uint64_t seed,
                                     std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> mix(0.0, 0.5 * kPi);
  const double alpha = angle(rng);
  const double beta = angle(rng);
  const double gamma = angle(rng);
  const double theta = mix(rng);

  // U = e^{i alpha} [[e^{i beta} cos, e^{i gamma} sin], [-e^{-i gamma} sin, e^{-i beta} cos]]
  const Complex g = std::polar(1.0, alpha);
  const Complex u00 = g * std::polar(std::cos(theta), beta);
  const Complex u01 = g * std::polar(std::sin(theta), gamma);
  const Complex u10 = -g * std::polar(std::sin(theta), -gamma);
  const Complex u11 = g * std::polar(std::cos(theta), -beta);
  return {combine(u00, phi1, u10, phi2), combine(u01, phi1, u11, phi2)};
}

FieldMap ulink_field_map(const ModelParams& p, const BZGrid& grid, const ChernOptions& options) {
  p.validate();
  const std::size_t count = grid.size();
  std::vector<PointStates> states(count);

  parallel_for(count, options.workers, [&](std::size_t idx) {
    const int r = static_cast<int>(idx / static_cast<std::size_t>(grid.N()));
    const int n = static_cast<int>(idx % static_cast<std::size_t>(grid.N()));
    const Momentum k = grid.point(r, n);
    OccupiedPair occ = occupied_states(p, k, options.gap_floor);
    if (options.scramble_seed) {
      const auto mixed = scramble_pair(occ.phi1, occ.phi2, *options.scramble_seed, idx);
      occ.phi1 = mixed[0];
      occ.phi2 = mixed[1];
    }
    const SpinSplitPair sp = spin_split(occ, k, options.op, options.gap_floor);
    states[idx] = {sp.psi_plus, sp.psi_minus, sp.spin_gap(), occ.gap};
  });

  FieldMap out;
  out.R = grid.R();
  out.N = grid.N();
  out.plus.resize(count);
  out.minus.resize(count);
  out.delta_s = std::numeric_limits<double>::infinity();
  out.delta_cv = std::numeric_limits<double>::infinity();
  for (int r = 0; r < grid.R(); ++r)
    for (int n = 0; n < grid.N(); ++n) {
      const PointStates& s = states[grid.index(r, n)];
      if (s.spin_gap < out.delta_s) {
        out.delta_s = s.spin_gap;
        out.delta_s_where = grid.point(r, n);
      }
      if (s.energy_gap < out.delta_cv) {
        out.delta_cv = s.energy_gap;
        out.delta_cv_where = grid.point(r, n);
      }
    }

  parallel_for(count, options.workers, [&](std::size_t idx) {
    const int r = static_cast<int>(idx / static_cast<std::size_t>(grid.N()));
    const int n = static_cast<int>(idx % static_cast<std::size_t>(grid.N()));
    const std::array<std::size_t, 4> corner{grid.index(r, n), grid.index(r + 1, n), grid.index(r + 1, n + 1),
                                            grid.index(r, n + 1)};
    try {
      out.plus[idx] = ulink_field_strength(
          {states[corner[0]].plus, states[corner[1]].plus, states[corner[2]].plus, states[corner[3]].plus});
      out.minus[idx] = ulink_field_strength(
          {states[corner[0]].minus, states[corner[1]].minus, states[corner[2]].minus, states[corner[3]].minus});
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), to_kpoint(grid.point(r, n)));
    }
  });
  return out;
}

InvariantRecord spin_chern(const ModelParams& p, const BZGrid& grid, const ChernOptions& options) {
  const FieldMap f = ulink_field_map(p, grid, options);
  double sum_plus = 0.0;
  double sum_minus = 0.0;
  for (std::size_t i = 0; i < f.plus.size(); ++i) {
    sum_plus += f.plus[i];
    sum_minus += f.minus[i];
  }
  InvariantRecord rec;
  rec.c_plus = sum_plus / kTwoPi;
  rec.c_minus = sum_minus / kTwoPi;
  rec.c_s = 0.5 * (rec.c_plus - rec.c_minus);
  rec.delta_s = f.delta_s;
  rec.delta_cv = f.delta_cv;
  rec.grid_R = grid.R();
  rec.grid_N = grid.N();
  return rec;
}

}  // namespace bhz
