#pragma once

#include <cstddef>
#include <numbers>

namespace bhz {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle into [-pi, pi).
double wrap_angle(double angle) noexcept;

/// Crystal momentum (kx, ky), always stored wrapped into [-pi, pi).
class Momentum {
 public:
  Momentum() = default;
  Momentum(double kx, double ky) noexcept : kx_(wrap_angle(kx)), ky_(wrap_angle(ky)) {}

  double kx() const noexcept { return kx_; }
  double ky() const noexcept { return ky_; }

 private:
  double kx_ = 0.0;
  double ky_ = 0.0;
};

/// Periodic R x N discretization of the Brillouin zone with
/// k_r = -pi + 2 pi r / R and k_n = -pi + 2 pi n / N.
class BZGrid {
 public:
  static constexpr int kMinDivisions = 8;

  /// Throws Error(Precondition) unless R, N >= 8.
  BZGrid(int R, int N);

  int R() const noexcept { return R_; }
  int N() const noexcept { return N_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(R_) * static_cast<std::size_t>(N_); }

  double kx(int r) const noexcept;
  double ky(int n) const noexcept;
  Momentum point(int r, int n) const noexcept { return {kx(r), ky(n)}; }

  /// Row-major flat index; r and n wrap periodically.
  std::size_t index(int r, int n) const noexcept;

 private:
  int R_;
  int N_;
};

}  // namespace bhz
