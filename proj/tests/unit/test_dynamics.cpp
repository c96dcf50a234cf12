#include <random>

#include "doctest.h"
#include "dynamics.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace bhz;
using linalg::Complex;

namespace {

ModelParams point(double m_over_2b, double g_over_a) { return ModelParams::from_ratios(m_over_2b, g_over_a); }

double state_distance(const Vector4& a, const Vector4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

CurvatureMap constant_map(int nx, int ny, double fp, double fm, bool closed) {
  CurvatureMap map;
  const std::vector<double> ky = closed ? ky_line_set(ny) : std::vector<double>{};
  for (int q = 0; q < ny; ++q) {
    const double y = closed ? ky[static_cast<std::size_t>(q)] : -kPi + kTwoPi * q / ny;
    for (int j = 0; j < nx; ++j) map.samples.push_back({-kPi + kTwoPi * (j + 0.5) / nx, y, fp, fm, fp - fm});
  }
  return map;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("protocol validation and default steps") {
    SweepProtocol ok;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.duration(1.0) == doctest::Approx(24 * kPi));
    CHECK(ok.velocity(2.0) == doctest::Approx(kTwoPi / (12 * kPi)));

    SweepProtocol bad = ok;
    bad.steps = 4801;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = ok;
    bad.meas_count = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = ok;
    bad.omega_t_over_pi = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);

    CHECK(default_steps(24.0, 60) == 4800);
    CHECK(default_steps(192.0, 60) == 38400);
    const int s = default_steps(10.3, 60);
    CHECK(s % 120 == 0);
    CHECK(s >= 2060);
  }

  TEST_CASE("initial state") {
    const ModelParams p = point(1.0, 0.15);
    const Vector4 psi = prepare_initial_state(p, 0.4);
    CHECK(std::abs(linalg::norm_squared(psi) - 2.0) < 1e-12);
    const Matrix4 h = hamiltonian(p, Momentum(-kPi, 0.4));
    const double e = linalg::inner(psi, h * psi).real();
    CHECK(std::abs(e - 2.0 * eigenvalues_closed_form(p, Momentum(-kPi, 0.4))[0]) < 1e-10);

    // Above the band inversion the zone-edge state is the pure H pair.
    const Vector4 pure = prepare_initial_state(point(2.5, 0.0), 0.0);
    CHECK(state_distance(pure, Vector4{0.0, 1.0, 0.0, 1.0}) < 1e-12);
  }

  TEST_CASE("frozen Hamiltonian matches the exact exponential") {
    std::mt19937_64 rng(2);
    const auto raw = oracle::random_hermitian(rng, 4);
    Matrix4 h;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) h(i, j) = raw[4 * i + j];
    const auto st = oracle::random_state(rng);
    const Vector4 psi0{st[0], st[1], st[2], st[3]};
    const auto snaps = propagate_schedule([&](double) { return h; }, 5.0, 400, 10, psi0);
    REQUIRE(snaps.size() == 10);
    for (std::size_t j = 0; j < snaps.size(); ++j) {
      CHECK(snaps[j].t == doctest::Approx((j + 0.5) * 0.5));
      CHECK(state_distance(snaps[j].psi, linalg::unitary_exp(h, snaps[j].t) * psi0) < 1e-11);
    }
  }

  TEST_CASE("halving the step reduces the error sixteenfold") {
    const ModelParams p = point(1.0, 0.15);
    SweepProtocol prot;
    prot.ky = 0.3;
    prot.omega_t_over_pi = 8.0;
    prot.meas_count = 10;
    const Vector4 psi0 = prepare_initial_state(p, prot.ky);
    prot.steps = 8000;
    const Vector4 ref = propagate(p, prot, psi0).back().psi;
    prot.steps = 200;
    const double e1 = state_distance(propagate(p, prot, psi0).back().psi, ref);
    prot.steps = 400;
    const double e2 = state_distance(propagate(p, prot, psi0).back().psi, ref);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 > 14.0);
    CHECK(e1 / e2 < 18.0);
  }

  TEST_CASE("g = 0 keeps the blocks apart and the state normalized") {
    const ModelParams p = point(1.0, 0.0);
    SweepProtocol prot;
    prot.ky = -0.8;
    const auto snaps = propagate(p, prot, prepare_initial_state(p, prot.ky));
    for (const Snapshot& s : snaps) {
      const double np = linalg::norm_squared(project_pseudospin(s.psi, Sector::Plus));
      const double nm = linalg::norm_squared(project_pseudospin(s.psi, Sector::Minus));
      CHECK(std::abs(np - 1.0) < 1e-10);
      CHECK(std::abs(nm - 1.0) < 1e-10);
    }
  }

  TEST_CASE("projection, Bloch components and force") {
    const Vector4 psi{1.0, 2.0, Complex(0.0, 3.0), 4.0};
    const Vector2 plus = project_pseudospin(psi, Sector::Plus);
    const Vector2 minus = project_pseudospin(psi, Sector::Minus);
    CHECK(plus[1] == Complex(2.0));
    CHECK(minus[0] == Complex(0.0, 3.0));

    const double r = 1.0 / std::sqrt(2.0);
    const auto b = [](Vector2 v) { return bloch_expectations(v); };
    const Vec3 z = b({1.0, 0.0});
    const Vec3 x = b({r, r});
    const Vec3 y = b({r, Complex(0.0, r)});
    const Vec3 big = b({2.0, 0.0});
    CHECK(z[2] == doctest::Approx(1.0));
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
    CHECK(std::abs(y[0]) < 1e-15);
    CHECK(big[2] == doctest::Approx(4.0));

    const ModelParams p{1.0, 0.5, 1.0, 0.0};
    CHECK(generalized_force(p, 0.0, {0.3, 0.7, 0.9}) == doctest::Approx(0.7));
    CHECK(generalized_force(p, kPi / 2, {0.3, 0.7, 0.9}) == doctest::Approx(0.9));
    CHECK(generalized_force(p, kPi / 6, {0.0, 1.0, 1.0}) == doctest::Approx(std::cos(kPi / 6) + 0.5));
  }

  TEST_CASE("reference force") {
    const ModelParams p = point(1.0, 0.0);
    const oracle::Params op{1.0, 1.0, 2.0, 0.0};
    for (double ky : {-2.0, -0.4, 0.9}) {
      for (double kx : {-3.0, -1.0, 0.5, 2.2}) {
        for (int sector : {+1, -1}) {
          const Sector tau = sector > 0 ? Sector::Plus : Sector::Minus;
          const auto gb = oracle::ground_bloch(op, kx, ky, sector);
          const double want = std::cos(ky) * gb[1] + 2.0 * std::sin(ky) * gb[2];
          CHECK(std::abs(adiabatic_reference(p, Momentum(kx, ky), tau, ReferenceMode::Adiabatic) - want) < 1e-10);
        }
      }
      CHECK(adiabatic_reference(p, Momentum(0.2, ky), Sector::Plus, ReferenceMode::PaperConstant) ==
            doctest::Approx(4.0 * std::sin(ky)));
      CHECK(adiabatic_reference(p, Momentum(0.2, ky), Sector::Minus, ReferenceMode::Initial) ==
            doctest::Approx(adiabatic_reference(p, Momentum(-kPi, ky), Sector::Minus, ReferenceMode::Adiabatic)));
    }
  }

  TEST_CASE("boxcar smoothing") {
    std::vector<double> v{0, 0, 3, 0, 0};
    smooth_boxcar(v, 1);
    CHECK(v[2] == 3.0);
    smooth_boxcar(v, 3);
    CHECK(v[1] == doctest::Approx(1.0));
    CHECK(v[2] == doctest::Approx(1.0));
    CHECK(v[0] == doctest::Approx(0.0));
    std::vector<double> c(7, 2.5);
    smooth_boxcar(c, 4);
    for (double x : c) CHECK(x == doctest::Approx(2.5));
  }

  TEST_CASE("curvature integration") {
    const auto lines = ky_line_set(5);
    REQUIRE(lines.size() == 5);
    CHECK(lines.front() == doctest::Approx(-kPi));
    CHECK(lines.back() == doctest::Approx(kPi));
    CHECK(lines[2] == doctest::Approx(0.0));

    for (bool closed : {true, false}) {
      const ChernEstimate one = integrate_curvature(constant_map(40, 9, 0.5 / kPi, -0.5 / kPi, closed));
      CHECK(one.c_plus == doctest::Approx(1.0));
      CHECK(one.c_minus == doctest::Approx(-1.0));
      CHECK(one.c_s == doctest::Approx(1.0));
      CHECK(integrate_curvature(constant_map(40, 9, 0.0, 0.0, closed)).c_s == 0.0);
    }

    CurvatureMap bad = constant_map(40, 9, 1.0, 1.0, true);
    bad.samples[3].kx += 0.01;
    CHECK_THROWS_AS((void)integrate_curvature(bad), Error);
    CHECK_THROWS_AS((void)integrate_curvature(CurvatureMap{}), Error);
  }

  TEST_CASE("linear-response spin Chern number") {
    SweepProtocol prot;
    const auto lines = ky_line_set(11);
    const LrResult r0 = lr_spin_chern(point(1.0, 0.0), prot, lines);
    CHECK(std::abs(r0.estimate.c_s - 1.0) < 0.01);
    CHECK(std::abs(r0.estimate.c_plus + r0.estimate.c_minus) < 1e-6);
    CHECK(r0.map.samples.size() == 11u * 60u);

    const LrResult r1 = lr_spin_chern(point(1.0, 0.15), prot, lines, ReferenceMode::Adiabatic, 1, 3);
    CHECK(std::abs(r1.estimate.c_s - 1.0) < 0.05);
    const LrResult r1s = lr_spin_chern(point(1.0, 0.15), prot, lines);
    CHECK(r1.estimate.c_s == r1s.estimate.c_s);

    const LrResult triv = lr_spin_chern(point(-0.5, 0.0), prot, lines);
    CHECK(std::abs(triv.estimate.c_s) < 0.01);
  }

  TEST_CASE("slow sweep approaches the analytic curvature") {
    // Single snapshots carry an O(v) ringing from the sudden start of the
    // sweep, so the comparison uses a boxcar over many ringing periods.
    const ModelParams p = point(1.0, 0.0);
    const oracle::Params op{1.0, 1.0, 2.0, 0.0};
    SweepProtocol prot;
    prot.ky = 0.0;
    prot.omega_t_over_pi = 192.0;
    prot.meas_count = 3840;
    prot.steps = default_steps(192.0, prot.meas_count);
    const CurvatureMap map = berry_curvature_lr(p, prot, ReferenceMode::Adiabatic, 128);
    const CurvatureSample* near = &map.samples.front();
    for (const auto& s : map.samples)
      if (std::abs(s.kx) < std::abs(near->kx)) near = &s;
    const double want = oracle::plaquette_density(op, near->kx, 0.0, +1);
    CAPTURE(near->f_plus);
    CAPTURE(want);
    CHECK(std::abs(near->kx) < 1e-3);
    CHECK(std::abs(near->f_plus - want) < 0.05 * std::abs(want));
    CHECK(std::abs(near->f_minus + want) < 0.05 * std::abs(want));
  }

  TEST_CASE("g = 0 curvature symmetries along ky = 0") {
    const ModelParams p = point(1.0, 0.0);
    SweepProtocol prot;
    const CurvatureMap map = berry_curvature_lr(p, prot);
    const std::size_t n = map.samples.size();
    double worst_mirror = 0.0, worst_pair = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const CurvatureSample& a = map.samples[j];
      const CurvatureSample& b = map.samples[n - 1 - j];
      CHECK(std::abs(a.kx + b.kx) < 1e-12);
      worst_mirror = std::max(worst_mirror, std::abs(a.f_s - b.f_s));
      worst_pair = std::max(worst_pair, std::abs(a.f_plus + a.f_minus));
    }
    CAPTURE(worst_mirror);
    CHECK(worst_mirror < 0.05);
    CHECK(worst_pair < 1e-8);
  }

  TEST_CASE("a global phase on the initial state changes nothing observable") {
    const ModelParams p = point(1.0, 0.15);
    SweepProtocol prot;
    prot.ky = 0.5;
    prot.omega_t_over_pi = 8.0;
    prot.steps = default_steps(8.0, prot.meas_count);
    Vector4 psi = prepare_initial_state(p, prot.ky);
    const auto a = propagate(p, prot, psi);
    for (auto& x : psi) x *= std::polar(1.0, 1.234);
    const auto b = propagate(p, prot, psi);
    for (std::size_t j = 0; j < a.size(); ++j)
      for (Sector tau : {Sector::Plus, Sector::Minus}) {
        const Vec3 ba = bloch_expectations(project_pseudospin(a[j].psi, tau));
        const Vec3 bb = bloch_expectations(project_pseudospin(b[j].psi, tau));
        for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(ba[c] - bb[c]) < 1e-12);
      }
  }

  TEST_CASE("reference modes agree on the spin Chern number in a slow sweep") {
    SweepProtocol prot;
    prot.omega_t_over_pi = 96.0;
    prot.steps = default_steps(96.0, prot.meas_count);
    const auto lines = ky_line_set(11);
    const ModelParams p = point(1.0, 0.0);
    const double adiabatic = lr_spin_chern(p, prot, lines).estimate.c_s;
    const double initial = lr_spin_chern(p, prot, lines, ReferenceMode::Initial).estimate.c_s;
    const double constant = lr_spin_chern(p, prot, lines, ReferenceMode::PaperConstant).estimate.c_s;
    CAPTURE(adiabatic);
    CAPTURE(initial);
    CAPTURE(constant);
    CHECK(std::abs(adiabatic - initial) < 0.1);
    CHECK(std::abs(adiabatic - constant) < 0.1);
  }

  TEST_CASE("Magnus step and frame equivalence") {
    std::mt19937_64 rng(19);
    const auto raw = oracle::random_hermitian(rng, 4);
    Matrix4 h;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) h(i, j) = raw[4 * i + j];
    CHECK((magnus4_step([&](double) { return h; }, 0.3, 0.05) - linalg::unitary_exp(h, 0.05)).max_abs() < 1e-13);

    const auto st = oracle::random_state(rng);
    const Vector4 psi0{st[0], st[1], st[2], st[3]};
    const ModelParams p = point(1.0, 0.15);
    FrameCheckOptions opt;
    opt.duration = kPi;
    const FrameCheckReport rep = frame_equivalence_check(p, Momentum(0.3, -0.7), 20.0, psi0, opt);
    CHECK(rep.pass);
    CHECK(rep.steps > 0);
    CHECK(rep.max_population_deviation < kFrameTolerance);
    CHECK(rep.max_model_deviation >= 0.0);
    CHECK(rep.max_model_deviation < 1e-10);

    MicrowaveParams mw = model_to_microwaves(p, Momentum(0.3, -0.7), 20.0);
    mw.tones[3].detuning += 1e-3;
    try {
      (void)frame_equivalence_check(mw, psi0, opt);
      FAIL("expected closure violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ClosureViolation);
    }
  }
}
