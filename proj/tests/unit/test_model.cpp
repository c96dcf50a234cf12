#include <random>

#include "doctest.h"
#include "errors.hpp"
#include "model.hpp"
#include "oracles.hpp"

using namespace bhz;
using linalg::Complex;

namespace {

const ModelParams kBase{1.0, 1.0, 2.0, 0.0};

void check_vec(const Vec3& got, const Vec3& want, double tol = 1e-12) {
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < tol);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("parameter validation") {
    CHECK_NOTHROW(kBase.validate());
    CHECK_THROWS_AS((ModelParams{0.0, 1.0, 2.0, 0.0}.validate()), Error);
    CHECK_THROWS_AS((ModelParams{1.0, 1.0, 2.0, -0.1}.validate()), Error);
    CHECK_THROWS_AS((ModelParams{1.0, std::nan(""), 2.0, 0.0}.validate()), Error);
    const ModelParams r = ModelParams::from_ratios(-0.5, 0.15);
    CHECK(r.M == doctest::Approx(-1.0));
    CHECK(r.g == doctest::Approx(0.15));
  }

  TEST_CASE("momentum wraps into [-pi, pi)") {
    CHECK(Momentum(kPi, 0.0).kx() == doctest::Approx(-kPi));
    CHECK(Momentum(3 * kPi + 0.25, -kTwoPi).kx() == doctest::Approx(-kPi + 0.25));
    CHECK(Momentum(0.0, -kTwoPi).ky() == doctest::Approx(0.0));
    for (double x : {-7.0, -3.2, -kPi, 0.0, 3.14, kPi, 9.9}) {
      const double w = wrap_angle(x);
      CHECK(w >= -kPi);
      CHECK(w < kPi);
    }
  }

  TEST_CASE("coefficients") {
    check_vec(coefficients(kBase, Momentum(0, 0)).plus, {0, 0, 2});
    check_vec(coefficients(kBase, Momentum(0, 0)).minus, {0, 0, 2});
    check_vec(coefficients(kBase, Momentum(kPi / 2, 0)).plus, {1, 0, 0});
    check_vec(coefficients(kBase, Momentum(-kPi, 0)).plus, {0, 0, -2});

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const oracle::Params op{1.0, 0.7, -0.4, 0.0};
    const ModelParams mp{1.0, 0.7, -0.4, 0.0};
    for (int i = 0; i < 200; ++i) {
      const double kx = u(rng), ky = u(rng);
      const auto c = coefficients(mp, Momentum(kx, ky));
      check_vec(c.plus, oracle::field(op, kx, ky, +1));
      check_vec(c.minus, oracle::field(op, kx, ky, -1));
      CHECK(c.plus[0] == -c.minus[0]);
      CHECK(c.plus[1] == c.minus[1]);
      CHECK(c.plus[2] == c.minus[2]);
    }
  }

  TEST_CASE("hamiltonian structure") {
    const Matrix4 h0 = hamiltonian(kBase, Momentum(0, 0));
    CHECK((h0 - Matrix4::diagonal({2, -2, 2, -2})).max_abs() < 1e-15);

    const ModelParams p{1.0, 1.0, 2.0, 0.15};
    const auto es = linalg::hermitian_eigh(hamiltonian(p, Momentum(0, 0)));
    const double e = std::sqrt(4.0225);
    CHECK(std::abs(es.values[0] + e) < 1e-12);
    CHECK(std::abs(es.values[3] - e) < 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
      const Momentum k(u(rng), u(rng));
      const Matrix4 h = hamiltonian(p, k);
      CHECK((h - h.adjoint()).max_abs() == 0.0);
      // 2 pi periodicity.
      const Matrix4 hs = hamiltonian(p, Momentum(k.kx() + kTwoPi, k.ky() - 2 * kTwoPi));
      CHECK((h - hs).max_abs() < 1e-13);
    }
  }

  TEST_CASE("time-reversal structure at g = 0") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
      const double kx = u(rng), ky = u(rng);
      const Matrix4 h = hamiltonian(kBase, Momentum(kx, ky));
      const Matrix4 hm = hamiltonian(kBase, Momentum(-kx, -ky));
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) CHECK(std::abs(h(a + 2, b + 2) - std::conj(hm(a, b))) < 1e-14);
    }
  }

  TEST_CASE("closed-form eigenvalues against the eigensolver") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::uniform_real_distribution<double> par(-3.0, 3.0);
    std::uniform_real_distribution<double> gg(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const ModelParams p{1.0, par(rng), par(rng), gg(rng)};
      const Momentum k(u(rng), u(rng));
      const auto cf = eigenvalues_closed_form(p, k);
      const auto es = linalg::hermitian_eigh(hamiltonian(p, k));
      CHECK(cf[0] <= 0.0);
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(cf[j] - es.values[j]) < 1e-10);
      CHECK(std::abs(es.values[0] - es.values[1]) < 1e-10);
      CHECK(std::abs(es.values[2] - es.values[3]) < 1e-10);
    }
  }

  TEST_CASE("energy gap") {
    const BZGrid grid(24, 24);
    const oracle::Params op{1.0, 1.0, 2.0, 0.0};
    double best = 1e300;
    for (int r = 0; r < 24; ++r)
      for (int n = 0; n < 24; ++n) {
        const auto d = oracle::field(op, grid.kx(r), grid.ky(n), 1);
        best = std::min(best, 2.0 * oracle::norm(d));
      }
    const GapReport rep = energy_gap(kBase, grid);
    CHECK(std::abs(rep.value - best) < 1e-12);
    CHECK(std::abs(2.0 * eigenvalues_closed_form(kBase, rep.where)[2] - rep.value) < 1e-12);

    const GapReport zero = energy_gap(ModelParams{1.0, 1.0, 0.0, 0.0}, grid);
    CHECK(zero.value < 1e-12);
    CHECK(std::abs(zero.where.kx()) < 1e-12);
    CHECK(std::abs(zero.where.ky()) < 1e-12);

    double prev = -1.0;
    for (double g : {0.0, 0.05, 0.1, 0.2, 0.3}) {
      const double v = energy_gap(ModelParams{1.0, 1.0, 0.4, g}, grid).value;
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("gamma matrices") {
    const GammaMatrices g = gamma_matrices();
    CHECK((g.z * g.z - Matrix4::identity()).max_abs() == 0.0);
    CHECK((g.y - g.y.adjoint()).max_abs() == 0.0);
    const auto es = linalg::hermitian_eigh(g.y);
    CHECK(es.values[0] == doctest::Approx(-1.0));
    CHECK(es.values[1] == doctest::Approx(-1.0));
    CHECK(es.values[2] == doctest::Approx(1.0));
    CHECK(es.values[3] == doctest::Approx(1.0));
    // Gamma_y = -blockdiag(sigma_y, sigma_y)
    const Matrix2 sy = pauli_y();
    for (std::size_t b = 0; b < 4; b += 2)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(g.y(b + i, b + j) == -sy(i, j));
    CHECK(g.y(0, 1) == Complex(0.0, 1.0));
    CHECK(g.y(1, 0) == Complex(0.0, -1.0));
  }

  TEST_CASE("dky_hamiltonian") {
    const ModelParams p{1.0, 0.8, 1.3, 0.2};
    const GammaMatrices g = gamma_matrices();
    CHECK((dky_hamiltonian(p, Momentum(0.4, 0.0)) - g.y * Complex(p.A)).max_abs() < 1e-15);
    CHECK((dky_hamiltonian(p, Momentum(0.4, kPi / 2)) + g.z * Complex(2 * p.B)).max_abs() < 1e-15);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const double h = 1e-5;
    for (int i = 0; i < 200; ++i) {
      const double kx = u(rng), ky = u(rng);
      const Matrix4 fd =
          (hamiltonian(p, Momentum(kx, ky + h)) - hamiltonian(p, Momentum(kx, ky - h))) * Complex(1.0 / (2 * h));
      const Matrix4 an = dky_hamiltonian(p, Momentum(kx, ky));
      CHECK((fd - an).max_abs() < 1e-8);
      const Matrix4 decomposition = g.y * Complex(p.A * std::cos(ky)) - g.z * Complex(2 * p.B * std::sin(ky));
      CHECK((an - decomposition).max_abs() == 0.0);
    }
  }

  TEST_CASE("lab-frame Hamiltonian") {
    MicrowaveParams mw;
    mw.level_plus_h = 0.0;
    mw.level_plus_e = 50.0;
    mw.level_minus_h = 20.0;
    mw.level_minus_e = 80.0;
    CHECK((lab_frame_hamiltonian(mw, 1.3) - Matrix4::diagonal({50, 0, 80, 20})).max_abs() == 0.0);

    for (auto& t : mw.tones) t = {0.7, 0.3, 0.0};
    const Matrix4 h0 = lab_frame_hamiltonian(mw, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(h0(i, j).imag() == 0.0);

    for (std::size_t k = 0; k < 4; ++k) mw.tones[k] = {0.3 + 0.1 * k, 0.2 * k, 1.0 - 0.7 * k};
    const Matrix4 h = lab_frame_hamiltonian(mw, 2.7);
    CHECK((h - h.adjoint()).max_abs() == 0.0);
    CHECK(mw.carrier(3) == doctest::Approx(0.4 + 30.0));
    CHECK_THROWS_AS((void)mw.transition(5), Error);
  }

  TEST_CASE("rotating-frame Hamiltonian") {
    MicrowaveParams mw;
    mw.tones[0].detuning = 0.4;
    mw.tones[1].detuning = -0.2;
    mw.tones[2].detuning = 0.1;
    mw.tones[3].detuning = 0.1;
    CHECK((rotating_frame_hamiltonian(mw) - Matrix4::diagonal({-0.2, 0.2, 0.1, -0.1})).max_abs() < 1e-15);

    mw.tones[3].detuning = 0.2;
    try {
      (void)rotating_frame_hamiltonian(mw);
      FAIL("expected closure violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ClosureViolation);
    }
  }

  TEST_CASE("model -> microwaves roundtrip gives H/2") {
    const auto zonly = model_to_microwaves(kBase, Momentum(0, 0), 50.0);
    CHECK(zonly.tones[0].rabi == doctest::Approx(0.0));
    CHECK(std::abs(zonly.tones[0].detuning) == doctest::Approx(2.0));
    const auto xonly = model_to_microwaves(kBase, Momentum(kPi / 2, 0), 50.0);
    CHECK(xonly.tones[0].rabi == doctest::Approx(1.0));
    CHECK(xonly.tones[0].phase == doctest::Approx(0.0));
    CHECK(std::abs(xonly.tones[0].detuning) < 1e-15);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 300; ++i) {
      const ModelParams p{1.0, 0.5 + 0.1 * (i % 7), -1.5 + 0.01 * i, 0.05 * (i % 5)};
      const Momentum k(u(rng), u(rng));
      const MicrowaveParams mw = model_to_microwaves(p, k, 10.0 + i);
      CHECK(mw.closure() == 0.0);
      CHECK(mw.tones[2].rabi == p.g);
      CHECK(mw.tones[3].rabi == p.g);
      CHECK((rotating_frame_hamiltonian(mw) - hamiltonian(p, k) * Complex(0.5)).max_abs() < 1e-12);
    }
    CHECK_THROWS_AS((void)model_to_microwaves(kBase, Momentum(0, 0), 5.0), Error);
  }
}
