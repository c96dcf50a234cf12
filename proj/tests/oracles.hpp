#pragma once

// Reference computations used only by the tests. None of them calls into the
// library's eigensolver, spin projection or U-link code.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using V3 = std::array<double, 3>;
using V2c = std::array<cd, 2>;

inline constexpr double pi = std::numbers::pi;

struct Params {
  double A = 1.0;
  double B = 1.0;
  double M = 2.0;
  double g = 0.0;
};

inline double mass(const Params& p, double kx, double ky) { return p.M - 2.0 * p.B * (2.0 - std::cos(kx) - std::cos(ky)); }

/// d-vector of one block; sector +1 or -1.
inline V3 field(const Params& p, double kx, double ky, int sector) {
  return {sector * p.A * std::sin(kx), -p.A * std::sin(ky), mass(p, kx, ky)};
}

inline V3 dfield_dkx(const Params& p, double kx, int sector) {
  return {sector * p.A * std::cos(kx), 0.0, -2.0 * p.B * std::sin(kx)};
}

inline V3 dfield_dky(const Params& p, double ky) { return {0.0, -p.A * std::cos(ky), -2.0 * p.B * std::sin(ky)}; }

inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const V3& a) { return std::sqrt(dot(a, a)); }

/// Lower eigenvector of d.sigma in closed form, normalized. Two gauges, one
/// singular at d along -z and one at +z; the better conditioned is used.
inline V2c lower_state(const V3& d) {
  const double r = norm(d);
  V2c u{cd(-d[0], d[1]), cd(d[2] + r, 0.0)};
  if (d[2] < 0.0) u = {cd(r - d[2], 0.0), cd(-d[0], -d[1])};
  const double n = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
  return {u[0] / n, u[1] / n};
}

/// Curvature density whose integral over a plaquette is the phase of the
/// counter-clockwise link product for the lower band of d.sigma:
/// -(1/2) d . (d_x d x d_y d) / |d|^3.
inline double plaquette_density(const Params& p, double kx, double ky, int sector) {
  const V3 d = field(p, kx, ky, sector);
  const V3 dx = dfield_dkx(p, kx, sector);
  const V3 dy = dfield_dky(p, ky);
  const double r = norm(d);
  return -0.5 * dot(d, cross(dx, dy)) / (r * r * r);
}

/// Arg of the counter-clockwise link product around a tiny h x h square,
/// divided by h^2. Converges to plaquette_density as h -> 0.
inline double loop_phase_density(const Params& p, double kx, double ky, int sector, double h = 1e-4) {
  const auto u = [&](double x, double y) { return lower_state(field(p, x, y, sector)); };
  const auto ov = [](const V2c& a, const V2c& b) { return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]; };
  const V2c a = u(kx - h / 2, ky - h / 2), b = u(kx + h / 2, ky - h / 2), c = u(kx + h / 2, ky + h / 2),
            d = u(kx - h / 2, ky + h / 2);
  return std::arg(ov(a, b) * ov(b, c) * ov(c, d) * ov(d, a)) / (h * h);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Integral of plaquette_density over [x0,x1]x[y0,y1] by tensor Gauss-Legendre.
inline double plaquette_integral(const Params& p, double x0, double x1, double y0, double y1, int sector,
                                 int order = 16) {
  const auto [x, w] = gauss_legendre(order);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      s += w[i] * w[j] *
           plaquette_density(p, 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * x[i], 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * x[j],
                             sector);
  return s * 0.25 * (x1 - x0) * (y1 - y0);
}

/// Chern number of the lower band of one g = 0 block by a plain link product
/// on closed-form states: (1/2pi) sum Arg(loop).
inline double two_band_chern(const Params& p, int sector, int R, int N) {
  const auto kx = [&](int r) { return -pi + 2.0 * pi * ((r % R + R) % R) / R; };
  const auto ky = [&](int n) { return -pi + 2.0 * pi * ((n % N + N) % N) / N; };
  const auto ov = [](const V2c& a, const V2c& b) { return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]; };
  double s = 0.0;
  for (int r = 0; r < R; ++r)
    for (int n = 0; n < N; ++n) {
      const V2c a = lower_state(field(p, kx(r), ky(n), sector));
      const V2c b = lower_state(field(p, kx(r + 1), ky(n), sector));
      const V2c c = lower_state(field(p, kx(r + 1), ky(n + 1), sector));
      const V2c d = lower_state(field(p, kx(r), ky(n + 1), sector));
      s += std::arg(ov(a, b) * ov(b, c) * ov(c, d) * ov(d, a));
    }
  return s / (2.0 * pi);
}

/// Lower-band Bloch vector of a g = 0 block: -d / |d|.
inline V3 ground_bloch(const Params& p, double kx, double ky, int sector) {
  const V3 d = field(p, kx, ky, sector);
  const double r = norm(d);
  return {-d[0] / r, -d[1] / r, -d[2] / r};
}

/// Random Hermitian n x n matrix as a row-major complex vector.
inline std::vector<cd> random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<cd> h(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    h[static_cast<std::size_t>(i * n + i)] = nd(rng);
    for (int j = i + 1; j < n; ++j) {
      const cd z(nd(rng), nd(rng));
      h[static_cast<std::size_t>(i * n + j)] = z;
      h[static_cast<std::size_t>(j * n + i)] = std::conj(z);
    }
  }
  return h;
}

/// Random 4-component state with norm^2 = 2.
inline std::array<cd, 4> random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::array<cd, 4> v;
  double s = 0.0;
  for (auto& x : v) {
    x = cd(nd(rng), nd(rng));
    s += std::norm(x);
  }
  for (auto& x : v) x *= std::sqrt(2.0 / s);
  return v;
}

}  // namespace oracle
