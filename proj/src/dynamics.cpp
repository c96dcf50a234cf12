#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace bhz {

namespace {

constexpr double kNormDriftLimit = 1e-6;
constexpr double kSamplingTolerance = 1e-9;
constexpr int kStepsPerPi = 200;
constexpr int kMinMeasurements = 8;
constexpr double kMagnusPhasePerStep = 0.02;

const double kGaussOffset = std::sqrt(3.0) / 6.0;
const double kMagnusCommutator = std::sqrt(3.0) / 12.0;

Vec3 sector_bloch(const Vector4& psi, Sector tau) { return bloch_expectations(project_pseudospin(psi, tau)); }

double max_population_gap(const Vector4& a, const Vector4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(std::norm(a[i]) - std::norm(b[i])));
  return m;
}

double max_amplitude_gap(const Vector4& a, const Vector4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

const char* to_string(ReferenceMode mode) noexcept {
  switch (mode) {
    case ReferenceMode::Adiabatic: return "adiabatic";
    case ReferenceMode::Initial: return "initial";
    case ReferenceMode::PaperConstant: return "paper-constant";
  }
  return "unknown";
}

void SweepProtocol::validate() const {
  std::ostringstream os;
  if (!std::isfinite(ky)) os << "ky must be finite; ";
  if (!(omega_t_over_pi > 0.0) || !std::isfinite(omega_t_over_pi)) os << "omega_t_over_pi must be > 0; ";
  if (meas_count < kMinMeasurements) os << "meas_count must be >= " << kMinMeasurements << "; ";
  if (steps <= 0 || meas_count <= 0 || steps % (2 * meas_count) != 0)
    os << "steps (" << steps << ") must be a positive multiple of 2 * meas_count; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw Error(ErrorKind::InvalidInput, "invalid sweep protocol: " + msg.substr(0, msg.size() - 2));
}

int default_steps(double omega_t_over_pi, int meas_count) {
  const int unit = 2 * std::max(meas_count, 1);
  const int raw = static_cast<int>(std::ceil(kStepsPerPi * omega_t_over_pi - 1e-9));
  return std::max(unit, (raw + unit - 1) / unit * unit);
}

Vector4 prepare_initial_state(const ModelParams& p, double ky, double gap_floor) {
  const Momentum start(-kPi, ky);
  try {
    const SpinSplitPair sp = spin_split(p, start, SpinOperator::Pseudospin, gap_floor);
    Vector4 psi;
    for (std::size_t i = 0; i < 4; ++i) psi[i] = sp.psi_plus[i] + sp.psi_minus[i];
    return psi;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("initial state preparation failed: ") + e.what(), e.where());
  }
}

std::vector<Snapshot> propagate_schedule(const std::function<Matrix4(double)>& h, double duration, int steps,
                                         int meas_count, const Vector4& psi0) {
  if (steps <= 0 || meas_count <= 0 || steps % (2 * meas_count) != 0) {
    throw Error(ErrorKind::InvalidInput, "steps must be a positive multiple of 2 * meas_count");
  }
  const double dt = duration / steps;
  const int per = steps / meas_count;
  const double norm0 = linalg::norm_squared(psi0);

  std::vector<Snapshot> out;
  out.reserve(static_cast<std::size_t>(meas_count));
  Vector4 psi = psi0;
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    psi = magnus4_step(h, t, dt) * psi;
    const bool snapshot = (i + 1) % per == per / 2;
    if (snapshot || i + 1 == steps) {
      const double drift = std::abs(linalg::norm_squared(psi) - norm0);
      if (drift > kNormDriftLimit) {
        std::ostringstream os;
        os << "norm drift " << drift << " after step " << i + 1 << " of " << steps << " (t = " << t + dt
           << ", dt = " << dt << ")";
        throw Error(ErrorKind::IntegratorFailure, os.str());
      }
    }
    if (snapshot) out.push_back({(i + 1) * dt, psi});
  }
  return out;
}

std::vector<Snapshot> propagate(const ModelParams& p, const SweepProtocol& protocol, const Vector4& psi0) {
  p.validate();
  protocol.validate();
  const double v = protocol.velocity(p.A);
  const double ky = protocol.ky;
  return propagate_schedule([&](double t) { return hamiltonian(p, Momentum(v * t - kPi, ky)); },
                            protocol.duration(p.A), protocol.steps, protocol.meas_count, psi0);
}

Vector2 project_pseudospin(const Vector4& psi, Sector tau) noexcept {
  const std::size_t off = tau == Sector::Plus ? 0 : 2;
  return {psi[off], psi[off + 1]};
}

Vec3 bloch_expectations(const Vector2& eta) noexcept {
  const Complex cross = std::conj(eta[0]) * eta[1];
  return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(eta[0]) - std::norm(eta[1])};
}

double generalized_force(const ModelParams& p, double ky, const Vec3& bloch) noexcept {
  return p.A * std::cos(ky) * bloch[1] + 2.0 * p.B * std::sin(ky) * bloch[2];
}

double adiabatic_reference(const ModelParams& p, const Momentum& k, Sector tau, ReferenceMode mode,
                           double gap_floor) {
  if (mode == ReferenceMode::PaperConstant) return 4.0 * p.B * std::sin(k.ky());
  const Momentum at = mode == ReferenceMode::Initial ? Momentum(-kPi, k.ky()) : k;
  const SpinSplitPair sp = spin_split(p, at, SpinOperator::Pseudospin, gap_floor);
  const Vector4& psi = tau == Sector::Plus ? sp.psi_plus : sp.psi_minus;
  return generalized_force(p, k.ky(), sector_bloch(psi, tau));
}

void CurvatureMap::append(const CurvatureMap& other) {
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

void smooth_boxcar(std::vector<double>& values, int window) {
  if (window <= 1 || values.empty()) return;
  const int n = static_cast<int>(values.size());
  const int half = window / 2;
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i - half + window - 1);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / (hi - lo + 1);
  }
  values.swap(out);
}

CurvatureMap berry_curvature_lr(const ModelParams& p, const SweepProtocol& protocol, ReferenceMode mode,
                                int smoothing_window, double gap_floor) {
  p.validate();
  protocol.validate();
  const double ky = protocol.ky;
  const double v = protocol.velocity(p.A);

  const Vector4 psi0 = prepare_initial_state(p, ky, gap_floor);
  const std::vector<Snapshot> snaps = propagate(p, protocol, psi0);

  double f0_plus = 0.0;
  double f0_minus = 0.0;
  if (mode != ReferenceMode::Adiabatic) {
    f0_plus = adiabatic_reference(p, Momentum(-kPi, ky), Sector::Plus, mode, gap_floor);
    f0_minus = adiabatic_reference(p, Momentum(-kPi, ky), Sector::Minus, mode, gap_floor);
  }

  std::vector<double> fp(snaps.size());
  std::vector<double> fm(snaps.size());
  std::vector<double> kx(snaps.size());
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    kx[j] = v * snaps[j].t - kPi;
    const Momentum k(kx[j], ky);
    if (mode == ReferenceMode::Adiabatic) {
      const SpinSplitPair sp = spin_split(p, k, SpinOperator::Pseudospin, gap_floor);
      f0_plus = generalized_force(p, ky, sector_bloch(sp.psi_plus, Sector::Plus));
      f0_minus = generalized_force(p, ky, sector_bloch(sp.psi_minus, Sector::Minus));
    }
    fp[j] = (generalized_force(p, ky, sector_bloch(snaps[j].psi, Sector::Plus)) - f0_plus) / v;
    fm[j] = (generalized_force(p, ky, sector_bloch(snaps[j].psi, Sector::Minus)) - f0_minus) / v;
  }
  smooth_boxcar(fp, smoothing_window);
  smooth_boxcar(fm, smoothing_window);

  CurvatureMap map;
  map.omega_t_over_pi = protocol.omega_t_over_pi;
  map.mode = mode;
  map.samples.reserve(snaps.size());
  for (std::size_t j = 0; j < snaps.size(); ++j) map.samples.push_back({kx[j], ky, fp[j], fm[j], fp[j] - fm[j]});
  return map;
}

std::vector<double> ky_line_set(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "at least two ky lines are required");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) out[static_cast<std::size_t>(q)] = -kPi + kTwoPi * q / (n - 1);
  return out;
}

ChernEstimate integrate_curvature(const CurvatureMap& map) {
  std::map<double, std::vector<const CurvatureSample*>> lines;
  for (const auto& s : map.samples) lines[s.ky].push_back(&s);
  if (lines.size() < 2) throw Error(ErrorKind::InvalidInput, "curvature map needs at least two ky lines");

  std::vector<double> kx_ref;
  for (auto& [ky, line] : lines) {
    std::sort(line.begin(), line.end(), [](auto* a, auto* b) { return a->kx < b->kx; });
    std::vector<double> kx;
    for (auto* s : line) kx.push_back(s->kx);
    if (kx_ref.empty()) {
      if (kx.size() < 2) throw Error(ErrorKind::InvalidInput, "ky line has fewer than two kx samples");
      kx_ref = kx;
      const double d = kTwoPi / static_cast<double>(kx.size());
      for (std::size_t i = 1; i < kx.size(); ++i)
        if (std::abs(kx[i] - kx[i - 1] - d) > kSamplingTolerance)
          throw Error(ErrorKind::InvalidInput, "kx samples are not uniform and periodic over the zone");
    } else {
      bool same = kx.size() == kx_ref.size();
      for (std::size_t i = 0; same && i < kx.size(); ++i) same = std::abs(kx[i] - kx_ref[i]) <= kSamplingTolerance;
      if (!same) throw Error(ErrorKind::InvalidInput, "ky lines use different kx samples");
    }
  }

  std::vector<double> kys;
  for (const auto& [ky, line] : lines) kys.push_back(ky);
  const std::size_t n = kys.size();
  const double dky = (kys.back() - kys.front()) / static_cast<double>(n - 1);
  for (std::size_t q = 1; q < n; ++q)
    if (std::abs(kys[q] - kys[q - 1] - dky) > kSamplingTolerance)
      throw Error(ErrorKind::InvalidInput, "ky lines are not uniformly spaced");

  std::vector<double> weight(n, 1.0);
  double step = dky;
  if (std::abs(kys.back() - kys.front() - kTwoPi) <= kSamplingTolerance) {
    weight.front() = weight.back() = 0.5;
  } else if (std::abs(dky * static_cast<double>(n) - kTwoPi) <= kSamplingTolerance) {
    step = kTwoPi / static_cast<double>(n);
  } else {
    throw Error(ErrorKind::InvalidInput, "ky lines do not cover the Brillouin zone");
  }

  const double dkx = kTwoPi / static_cast<double>(kx_ref.size());
  double sum_plus = 0.0;
  double sum_minus = 0.0;
  std::size_t q = 0;
  for (const auto& [ky, line] : lines) {
    double lp = 0.0;
    double lm = 0.0;
    for (auto* s : line) {
      lp += s->f_plus;
      lm += s->f_minus;
    }
    sum_plus += weight[q] * lp;
    sum_minus += weight[q] * lm;
    ++q;
  }
  ChernEstimate est;
  est.c_plus = sum_plus * dkx * step / kTwoPi;
  est.c_minus = sum_minus * dkx * step / kTwoPi;
  est.c_s = 0.5 * (est.c_plus - est.c_minus);
  return est;
}

LrResult lr_spin_chern(const ModelParams& p, const SweepProtocol& base, const std::vector<double>& ky_lines,
                       ReferenceMode mode, int smoothing_window, int workers, double gap_floor) {
  std::vector<CurvatureMap> maps(ky_lines.size());
  parallel_for(ky_lines.size(), workers, [&](std::size_t q) {
    SweepProtocol proto = base;
    proto.ky = ky_lines[q];
    maps[q] = berry_curvature_lr(p, proto, mode, smoothing_window, gap_floor);
  });
  LrResult out;
  out.map.omega_t_over_pi = base.omega_t_over_pi;
  out.map.mode = mode;
  for (const auto& m : maps) out.map.append(m);
  out.estimate = integrate_curvature(out.map);
  return out;
}

Matrix4 magnus4_step(const std::function<Matrix4(double)>& h, double t, double dt) {
  const Matrix4 h1 = h(t + dt * (0.5 - kGaussOffset));
  const Matrix4 h2 = h(t + dt * (0.5 + kGaussOffset));
  const Matrix4 comm = h1 * h2 - h2 * h1;
  const Matrix4 heff = (h1 + h2) * Complex(0.5) + comm * Complex(0.0, kMagnusCommutator * dt);
  return linalg::unitary_exp(heff, dt);
}

FrameCheckReport frame_equivalence_check(const MicrowaveParams& mw, const Vector4& psi0,
                                         const FrameCheckOptions& options) {
  const Matrix4 h_rot = rotating_frame_hamiltonian(mw);
  if (!(options.duration > 0.0) || options.checkpoints < 1) {
    throw Error(ErrorKind::InvalidInput, "frame check needs a positive duration and at least one checkpoint");
  }

  int steps = options.steps;
  if (steps <= 0) {
    double fastest = std::max({std::abs(mw.level_plus_e - mw.level_plus_h), std::abs(mw.level_minus_e - mw.level_plus_h),
                               std::abs(mw.level_minus_h - mw.level_plus_h), 1.0});
    for (int k = 1; k <= 4; ++k) fastest = std::max(fastest, std::abs(mw.carrier(k)));
    steps = static_cast<int>(std::ceil(options.duration * fastest / kMagnusPhasePerStep));
  }
  steps = (steps + options.checkpoints - 1) / options.checkpoints * options.checkpoints;
  const int per = steps / options.checkpoints;
  const double dt = options.duration / steps;

  const auto lab = [&mw](double t) { return lab_frame_hamiltonian(mw, t); };
  FrameCheckReport report;
  report.steps = steps;
  Vector4 psi = frame_unitary(mw, 0.0) * psi0;
  for (int i = 0; i < steps; ++i) {
    psi = magnus4_step(lab, i * dt, dt) * psi;
    if ((i + 1) % per != 0) continue;
    const double t = (i + 1) * dt;
    const Vector4 rot = linalg::unitary_exp(h_rot, t) * psi0;
    const Vector4 expected = frame_unitary(mw, t) * rot;
    report.max_population_deviation = std::max(report.max_population_deviation, max_population_gap(psi, expected));
    report.max_state_deviation = std::max(report.max_state_deviation, max_amplitude_gap(psi, expected));
  }
  report.pass = report.max_population_deviation < kFrameTolerance;
  return report;
}

FrameCheckReport frame_equivalence_check(const ModelParams& p, const Momentum& k, double carrier_scale,
                                         const Vector4& psi0, const FrameCheckOptions& options) {
  p.validate();
  const MicrowaveParams mw = model_to_microwaves(p, k, carrier_scale);
  FrameCheckReport report = frame_equivalence_check(mw, psi0, options);

  const Matrix4 h_rot = rotating_frame_hamiltonian(mw);
  const Matrix4 h = hamiltonian(p, k);
  report.max_model_deviation = 0.0;
  for (int c = 1; c <= options.checkpoints; ++c) {
    const double t = options.duration * c / options.checkpoints;
    const Vector4 rot = linalg::unitary_exp(h_rot, t) * psi0;
    const Vector4 model = linalg::unitary_exp(h, 0.5 * t) * psi0;
    report.max_model_deviation = std::max(report.max_model_deviation, max_amplitude_gap(rot, model));
  }
  report.pass = report.pass && report.max_model_deviation < kFrameTolerance;
  return report;
}

}  // namespace bhz
