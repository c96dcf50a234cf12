#pragma once

// Small fixed-size dense complex linear algebra (2x2 and 4x4).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

namespace bhz::linalg {

using Complex = std::complex<double>;

template <std::size_t N>
using Vector = std::array<Complex, N>;

template <std::size_t N>
class Matrix {
 public:
  constexpr Matrix() : data_{} {}

  static constexpr Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  static constexpr std::size_t dim() { return N; }

  constexpr Complex& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
  constexpr const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

  Matrix adjoint() const {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const Complex aik = a(i, k);
        for (std::size_t j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector<N> operator*(const Matrix& a, const Vector<N>& v) {
    Vector<N> out{};
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  Vector<N> column(std::size_t j) const {
    Vector<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_column(std::size_t j, const Vector<N>& v) {
    for (std::size_t i = 0; i < N; ++i) (*this)(i, j) = v[i];
  }

  /// Largest entry modulus.
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

 private:
  std::array<Complex, N * N> data_;
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;
using Vector2 = Vector<2>;
using Vector4 = Vector<4>;

/// Eigenvalues ascending; eigenvectors stored as the matching columns.
/// Inside a degenerate cluster the basis is an arbitrary orthonormal one.
template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};
  Matrix<N> vectors;

  Vector<N> vector(std::size_t i) const { return vectors.column(i); }
};

/// <a|b>, antilinear in the first argument.
template <std::size_t N>
Complex inner(const Vector<N>& a, const Vector<N>& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
double norm_squared(const Vector<N>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

template <std::size_t N>
double norm(const Vector<N>& v) {
  return std::sqrt(norm_squared(v));
}

template <std::size_t N>
Matrix<N> outer(const Vector<N>& a, const Vector<N>& b) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

/// max_ij |H_ij - conj(H_ji)|
template <std::size_t N>
double max_asymmetry(const Matrix<N>& h) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m = std::max(m, std::abs(h(i, j) - std::conj(h(j, i))));
  return m;
}

/// Two eigenvalues belong to the same cluster when they differ by less than
/// 1e-9 * max(1, max|lambda|).
inline constexpr double kDegeneracyTolerance = 1e-9;

template <std::size_t N>
double degeneracy_threshold(const std::array<double, N>& values) {
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  return kDegeneracyTolerance * scale;
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
/// Throws Error(Precondition) when the input is not Hermitian.
template <std::size_t N>
EigenSystem<N> hermitian_eigh(const Matrix<N>& h);

/// exp(-i H dt) through the eigendecomposition of H.
template <std::size_t N>
Matrix<N> unitary_exp(const Matrix<N>& h, double dt);

/// Modified Gram-Schmidt in place. Throws Error(DegenerateInput) when a pivot
/// norm falls below 1e-10.
template <std::size_t N>
void orthonormalize(std::span<Vector<N>> vectors);

extern template EigenSystem<2> hermitian_eigh<2>(const Matrix<2>&);
extern template EigenSystem<4> hermitian_eigh<4>(const Matrix<4>&);
extern template Matrix<2> unitary_exp<2>(const Matrix<2>&, double);
extern template Matrix<4> unitary_exp<4>(const Matrix<4>&, double);
extern template void orthonormalize<2>(std::span<Vector<2>>);
extern template void orthonormalize<4>(std::span<Vector<4>>);

}  // namespace bhz::linalg
