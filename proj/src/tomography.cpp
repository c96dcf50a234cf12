#include "tomography.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace bhz {

namespace {

constexpr double kTotalPopulation = 2.0;

void check_norm(const Vector4& psi) {
  const double n = linalg::norm_squared(psi);
  if (!(std::abs(n - kTotalPopulation) <= kStateNormTolerance)) {
    std::ostringstream os;
    os << "state norm^2 is " << n << ", expected 2";
    throw Error(ErrorKind::InvalidInput, os.str());
  }
}

// Same pulse on both 2x2 blocks.
Matrix4 blockwise(const Matrix2& u) {
  Matrix4 m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      m(i, j) = u(i, j);
      m(i + 2, j + 2) = u(i, j);
    }
  return m;
}

std::array<double, 2> z_prime(const Vector4& psi) {
  const ProjectiveCounts c = projective_sequence(psi);
  const PopulationQuad q = solve_populations(c.z1, c.z2, c.z3);
  return {2.0 * q.plus_e - 1.0, 2.0 * q.minus_e - 1.0};
}

}  // namespace

PopulationQuad measure_populations(const Vector4& psi) {
  check_norm(psi);
  return {std::norm(psi[0]), std::norm(psi[1]), std::norm(psi[2]), std::norm(psi[3])};
}

Matrix4 pi_pulse(std::size_t a, std::size_t b) noexcept {
  Matrix4 u = Matrix4::identity();
  u(a, a) = 0.0;
  u(b, b) = 0.0;
  u(a, b) = Complex(0.0, -1.0);
  u(b, a) = Complex(0.0, -1.0);
  return u;
}

ProjectiveCounts projective_sequence(const Vector4& psi) {
  // The detector sees the E1 levels of both sectors.
  const auto detect = [](const Vector4& v) {
    const PopulationQuad q = measure_populations(v);
    return q.plus_e + q.minus_e;
  };
  return {detect(psi), detect(pi_pulse(0, 1) * psi), detect(pi_pulse(0, 3) * psi)};
}

PopulationQuad solve_populations(double z1, double z2, double z3) {
  const double minus_e = 0.5 * (z1 + z2 + z3 - kTotalPopulation);
  const PopulationQuad q{z1 - minus_e, z2 - minus_e, minus_e, z3 - minus_e};
  for (double v : {q.plus_e, q.plus_h, q.minus_e, q.minus_h}) {
    if (!(v >= -kPopulationSlack && v <= kTotalPopulation + kPopulationSlack)) {
      std::ostringstream os;
      os << "populations (" << q.plus_e << ", " << q.plus_h << ", " << q.minus_e << ", " << q.minus_h
         << ") recovered from (" << z1 << ", " << z2 << ", " << z3 << ") are outside [0, 2]";
      throw Error(ErrorKind::InconsistentData, os.str());
    }
  }
  return q;
}

Matrix4 analysis_pulse(AnalysisPulse pulse) noexcept {
  const double c = std::cos(0.25 * kPi);
  const double s = std::sin(0.25 * kPi);
  const double sign = (pulse == AnalysisPulse::XPlus || pulse == AnalysisPulse::YPlus) ? 1.0 : -1.0;
  const Matrix2 sigma = (pulse == AnalysisPulse::XPlus || pulse == AnalysisPulse::XMinus) ? pauli_x() : pauli_y();
  // exp(-i sign (pi/4) sigma) = cos(pi/4) I - i sign sin(pi/4) sigma
  const Matrix2 u = Matrix2::identity() * Complex(c) + sigma * Complex(0.0, -sign * s);
  return blockwise(u);
}

std::array<Vec3, 2> reconstruct_bloch(const Vector4& psi) {
  check_norm(psi);
  const auto z = z_prime(psi);
  const auto yp = z_prime(analysis_pulse(AnalysisPulse::YPlus) * psi);
  const auto ym = z_prime(analysis_pulse(AnalysisPulse::YMinus) * psi);
  const auto xp = z_prime(analysis_pulse(AnalysisPulse::XPlus) * psi);
  const auto xm = z_prime(analysis_pulse(AnalysisPulse::XMinus) * psi);
  std::array<Vec3, 2> out;
  for (std::size_t tau = 0; tau < 2; ++tau)
    out[tau] = {0.5 * (ym[tau] - yp[tau]), 0.5 * (xp[tau] - xm[tau]), z[tau]};
  return out;
}

Vec3 to_population_convention(const Vec3& direct, double block_norm2) noexcept {
  return {direct[0], direct[1], direct[2] + (block_norm2 - 1.0)};
}

Vec3 frame_rotation(const Vec3& bloch, double phi0) noexcept {
  const double c = std::cos(phi0);
  const double s = std::sin(phi0);
  return {c * bloch[0] - s * bloch[1], s * bloch[0] + c * bloch[1], bloch[2]};
}

std::vector<double> frame_angles(const ModelParams& p, const SweepProtocol& protocol) {
  p.validate();
  protocol.validate();
  const double v = protocol.velocity(p.A);
  const double dt = protocol.duration(p.A) / protocol.steps;
  const auto bz = [&](int i) { return mass_term(p, Momentum(v * (i * dt) - kPi, protocol.ky)); };
  std::vector<double> phi(static_cast<std::size_t>(protocol.steps) + 1, 0.0);
  double prev = bz(0);
  for (int i = 1; i <= protocol.steps; ++i) {
    const double cur = bz(i);
    phi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i - 1)] + 0.5 * dt * (prev + cur);
    prev = cur;
  }
  return phi;
}

double frame_angle(const ModelParams& p, const SweepProtocol& protocol) { return frame_angles(p, protocol).back(); }

Vector4 to_lab_frame(const Vector4& psi_rot, double phi0) noexcept {
  const Complex up = std::polar(1.0, 0.5 * phi0);
  const Complex down = std::conj(up);
  return {up * psi_rot[0], down * psi_rot[1], up * psi_rot[2], down * psi_rot[3]};
}

std::vector<TomographyRow> tomography_trace(const ModelParams& p, const SweepProtocol& protocol, double gap_floor) {
  const Vector4 psi0 = prepare_initial_state(p, protocol.ky, gap_floor);
  const std::vector<Snapshot> snaps = propagate(p, protocol, psi0);
  const std::vector<double> phi = frame_angles(p, protocol);
  const double v = protocol.velocity(p.A);
  const int per = protocol.steps / protocol.meas_count;

  std::vector<TomographyRow> rows;
  rows.reserve(2 * snaps.size());
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    const std::size_t node = j * static_cast<std::size_t>(per) + static_cast<std::size_t>(per / 2);
    const double phi0 = phi[node];
    const auto lab = reconstruct_bloch(to_lab_frame(snaps[j].psi, phi0));
    for (std::size_t s = 0; s < 2; ++s) {
      const Sector tau = s == 0 ? Sector::Plus : Sector::Minus;
      const Vector2 eta = project_pseudospin(snaps[j].psi, tau);
      TomographyRow row;
      row.t = snaps[j].t;
      row.kx = v * snaps[j].t - kPi;
      row.tau = s == 0 ? 1 : -1;
      row.block_norm = linalg::norm_squared(eta);
      row.direct = to_population_convention(bloch_expectations(eta), row.block_norm);
      row.pipeline = frame_rotation(lab[s], phi0);
      for (std::size_t c = 0; c < 3; ++c)
        row.residual = std::max(row.residual, std::abs(row.direct[c] - row.pipeline[c]));
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bhz
