#include "model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace bhz {

namespace {

constexpr double kClosureTolerance = 1e-12;
constexpr double kMinCarrierScale = 10.0;

const Complex kI{0.0, 1.0};

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(M) || !std::isfinite(g)) {
    throw Error(ErrorKind::InvalidInput, "model parameters must be finite");
  }
  if (!(A > 0.0)) throw Error(ErrorKind::InvalidInput, "model parameter A must be > 0");
  if (!(g >= 0.0)) throw Error(ErrorKind::InvalidInput, "model parameter g must be >= 0");
}

ModelParams ModelParams::from_ratios(double m_over_2b, double g_over_a, double A, double B) {
  ModelParams p;
  p.A = A;
  p.B = B;
  p.M = 2.0 * B * m_over_2b;
  p.g = g_over_a * A;
  return p;
}

double mass_term(const ModelParams& p, const Momentum& k) noexcept {
  return p.M - 2.0 * p.B * (2.0 - std::cos(k.kx()) - std::cos(k.ky()));
}

CoefficientPair coefficients(const ModelParams& p, const Momentum& k) noexcept {
  const double sx = p.A * std::sin(k.kx());
  const double sy = -p.A * std::sin(k.ky());
  const double mz = mass_term(p, k);
  return {{sx, sy, mz}, {-sx, sy, mz}};
}

Matrix2 pauli_x() noexcept {
  Matrix2 m;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix2 pauli_y() noexcept {
  Matrix2 m;
  m(0, 1) = -kI;
  m(1, 0) = kI;
  return m;
}

Matrix2 pauli_z() noexcept { return Matrix2::diagonal({1.0, -1.0}); }

Matrix2 block_hamiltonian(const Vec3& b) noexcept {
  Matrix2 m;
  m(0, 0) = b[2];
  m(1, 1) = -b[2];
  m(0, 1) = Complex(b[0], -b[1]);
  m(1, 0) = Complex(b[0], b[1]);
  return m;
}

Matrix4 hamiltonian(const ModelParams& p, const Momentum& k) noexcept {
  const CoefficientPair c = coefficients(p, k);
  const Matrix2 hp = block_hamiltonian(c.plus);
  const Matrix2 hm = block_hamiltonian(c.minus);
  Matrix4 h;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      h(i, j) = hp(i, j);
      h(i + 2, j + 2) = hm(i, j);
    }
  h(0, 3) = p.g;
  h(1, 2) = p.g;
  h(2, 1) = p.g;
  h(3, 0) = p.g;
  return h;
}

std::array<double, 4> eigenvalues_closed_form(const ModelParams& p, const Momentum& k) noexcept {
  const Vec3 b = coefficients(p, k).plus;
  const double e = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + p.g * p.g);
  return {-e, -e, e, e};
}

GapReport energy_gap(const ModelParams& p, const BZGrid& grid) {
  GapReport best{std::numeric_limits<double>::infinity(), {}};
  for (int r = 0; r < grid.R(); ++r)
    for (int n = 0; n < grid.N(); ++n) {
      const Momentum k = grid.point(r, n);
      const double gap = 2.0 * eigenvalues_closed_form(p, k)[2];
      if (gap < best.value) best = {gap, k};
    }
  return best;
}

GammaMatrices gamma_matrices() noexcept {
  GammaMatrices g;
  for (std::size_t b = 0; b < 4; b += 2) {
    g.x(b, b + 1) = 1.0;
    g.x(b + 1, b) = 1.0;
    g.y(b, b + 1) = kI;
    g.y(b + 1, b) = -kI;
  }
  g.z = Matrix4::diagonal({1.0, -1.0, 1.0, -1.0});
  return g;
}

Matrix4 dky_hamiltonian(const ModelParams& p, const Momentum& k) noexcept {
  const GammaMatrices g = gamma_matrices();
  return g.y * Complex(p.A * std::cos(k.ky())) - g.z * Complex(2.0 * p.B * std::sin(k.ky()));
}

double MicrowaveParams::transition(int k) const {
  switch (k) {
    case 1: return level_plus_e - level_plus_h;
    case 2: return level_minus_e - level_minus_h;
    case 3: return level_plus_e - level_minus_h;
    case 4: return level_minus_e - level_plus_h;
    default: throw Error(ErrorKind::InvalidInput, "tone index must be in 1..4");
  }
}

double MicrowaveParams::carrier(int k) const { return tones.at(static_cast<std::size_t>(k - 1)).detuning + transition(k); }

double MicrowaveParams::closure() const noexcept {
  return tones[0].detuning + tones[1].detuning - tones[2].detuning - tones[3].detuning;
}

Matrix4 lab_frame_hamiltonian(const MicrowaveParams& mw, double t) noexcept {
  Matrix4 h = Matrix4::diagonal({mw.level_plus_e - mw.level_plus_h, 0.0, mw.level_minus_e - mw.level_plus_h,
                                 mw.level_minus_h - mw.level_plus_h});
  // (upper, lower) level pair driven by each tone
  constexpr std::size_t pairs[4][2] = {{0, 1}, {2, 3}, {0, 3}, {2, 1}};
  for (int k = 0; k < 4; ++k) {
    const Tone& tone = mw.tones[static_cast<std::size_t>(k)];
    const double omega = tone.detuning + mw.transition(k + 1);
    const Complex c = std::polar(0.5 * tone.rabi, -(omega * t + tone.phase));
    const auto [u, l] = pairs[k];
    h(u, l) += c;
    h(l, u) += std::conj(c);
  }
  return h;
}

Matrix4 rotating_frame_hamiltonian(const MicrowaveParams& mw) {
  const double closure = mw.closure();
  if (std::abs(closure) > kClosureTolerance) {
    std::ostringstream os;
    os << "rotating frame is time dependent: Delta' = " << closure << " (must vanish)";
    throw Error(ErrorKind::ClosureViolation, os.str());
  }
  const auto& tn = mw.tones;
  const double d1 = tn[0].detuning;
  const double d2 = tn[1].detuning;
  const double shift = 0.5 * (tn[2].detuning - tn[3].detuning);

  Matrix4 h = Matrix4::diagonal({-0.5 * d1, 0.5 * d1, -0.5 * d2 + shift, 0.5 * d2 + shift});
  auto couple = [&h](std::size_t i, std::size_t j, const Tone& tone) {
    const Complex c = std::polar(0.5 * tone.rabi, -tone.phase);
    h(i, j) = c;
    h(j, i) = std::conj(c);
  };
  couple(0, 1, tn[0]);
  couple(2, 3, tn[1]);
  couple(0, 3, tn[2]);
  // tone 4 drives |-E> (upper) <-> |+H> (lower)
  couple(2, 1, tn[3]);
  return h;
}

Matrix4 frame_unitary(const MicrowaveParams& mw, double t) {
  const double w1 = mw.carrier(1);
  const double w3 = mw.carrier(3);
  const double w4 = mw.carrier(4);
  const double global = 0.5 * mw.tones[0].detuning * t;
  Matrix4 u;
  u(0, 0) = std::polar(1.0, global - w1 * t);
  u(1, 1) = std::polar(1.0, global);
  u(2, 2) = std::polar(1.0, global - w4 * t);
  u(3, 3) = std::polar(1.0, global - (w1 - w3) * t);
  return u;
}

MicrowaveParams model_to_microwaves(const ModelParams& p, const Momentum& k, double synthetic_carrier_scale) {
  if (!(synthetic_carrier_scale >= kMinCarrierScale) || !std::isfinite(synthetic_carrier_scale)) {
    std::ostringstream os;
    os << "synthetic carrier scale must be >= " << kMinCarrierScale << " (got " << synthetic_carrier_scale << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }
  const CoefficientPair c = coefficients(p, k);
  const double energy = std::max({1.0, norm3(c.plus), p.g});
  const double s = synthetic_carrier_scale * energy;

  MicrowaveParams mw;
  // Incommensurate splittings keep the four carriers well separated.
  mw.level_plus_h = 0.0;
  mw.level_plus_e = 1.0 * s;
  mw.level_minus_h = 0.37 * s;
  mw.level_minus_e = 1.61 * s;

  const double detuning = -c.plus[2];
  mw.tones[0] = {std::hypot(c.plus[0], c.plus[1]), detuning, std::atan2(c.plus[1], c.plus[0])};
  mw.tones[1] = {std::hypot(c.minus[0], c.minus[1]), detuning, std::atan2(c.minus[1], c.minus[0])};
  mw.tones[2] = {p.g, detuning, 0.0};
  mw.tones[3] = {p.g, detuning, 0.0};
  return mw;
}

}  // namespace bhz
