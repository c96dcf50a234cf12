#include "linalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "errors.hpp"

namespace bhz::linalg {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kJacobiConvergence = 1e-13;
constexpr int kMaxSweeps = 100;
constexpr double kRankTolerance = 1e-10;

template <std::size_t N>
double off_diagonal_norm(const Matrix<N>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Annihilates a(p,q) with U = D(alpha) * G(theta), where D rephases column q
// so the pivot is real and G is the classic real Jacobi rotation.
template <std::size_t N>
void rotate(Matrix<N>& a, Matrix<N>& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex phase = apq / r;  // e^{i alpha}
  const Complex phase_c = std::conj(phase);

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * r);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  // U_pp = c, U_pq = s, U_qp = -s e^{-i alpha}, U_qq = c e^{-i alpha}
  const Complex u_qp = -s * phase_c;
  const Complex u_qq = c * phase_c;

  for (std::size_t k = 0; k < N; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * c + akq * u_qp;
    a(k, q) = akp * s + akq * u_qq;

    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * c + vkq * u_qp;
    v(k, q) = vkp * s + vkq * u_qq;
  }
  for (std::size_t k = 0; k < N; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk + std::conj(u_qp) * aqk;
    a(q, k) = s * apk + std::conj(u_qq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

template <std::size_t N>
EigenSystem<N> hermitian_eigh(const Matrix<N>& h) {
  const double scale = h.max_abs();
  const double asym = max_asymmetry(h);
  if (!(asym < kHermitianTolerance * std::max(1.0, scale))) {
    std::ostringstream os;
    os << "hermitian_eigh: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }

  // Symmetrize so the rotations act on an exactly Hermitian matrix.
  Matrix<N> a;
  for (std::size_t i = 0; i < N; ++i) {
    a(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < N; ++j) {
      a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
      a(j, i) = std::conj(a(i, j));
    }
  }
  Matrix<N> v = Matrix<N>::identity();

  const double target = kJacobiConvergence * a.frobenius_norm();
  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (++sweep > kMaxSweeps) {
      throw Error(ErrorKind::Precondition, "hermitian_eigh: Jacobi iteration did not converge");
    }
    for (std::size_t p = 0; p + 1 < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) rotate(a, v, p, q);
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    out.vectors.set_column(k, v.column(order[k]));
  }
  return out;
}

template <std::size_t N>
Matrix<N> unitary_exp(const Matrix<N>& h, double dt) {
  const EigenSystem<N> es = hermitian_eigh(h);
  Matrix<N> u;
  for (std::size_t k = 0; k < N; ++k) {
    const Complex phase = std::polar(1.0, -es.values[k] * dt);
    for (std::size_t i = 0; i < N; ++i) {
      const Complex vik = es.vectors(i, k) * phase;
      for (std::size_t j = 0; j < N; ++j) u(i, j) += vik * std::conj(es.vectors(j, k));
    }
  }
  return u;
}

template <std::size_t N>
void orthonormalize(std::span<Vector<N>> vectors) {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& vi = vectors[i];
    const double original = norm(vi);
    // Two projection passes keep overlaps at rounding level.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        const Complex ov = inner(vectors[j], vi);
        for (std::size_t k = 0; k < N; ++k) vi[k] -= ov * vectors[j][k];
      }
    }
    const double n = norm(vi);
    if (n < kRankTolerance || n < kRankTolerance * original) {
      std::ostringstream os;
      os << "orthonormalize: vector " << i << " is linearly dependent (pivot norm " << n << ")";
      throw Error(ErrorKind::DegenerateInput, os.str());
    }
    for (auto& x : vi) x /= n;
  }
}

template EigenSystem<2> hermitian_eigh<2>(const Matrix<2>&);
template EigenSystem<4> hermitian_eigh<4>(const Matrix<4>&);
template Matrix<2> unitary_exp<2>(const Matrix<2>&, double);
template Matrix<4> unitary_exp<4>(const Matrix<4>&, double);
template void orthonormalize<2>(std::span<Vector<2>>);
template void orthonormalize<4>(std::span<Vector<4>>);

}  // namespace bhz::linalg
