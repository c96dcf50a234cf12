#include "brillouin.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace bhz {

double wrap_angle(double angle) noexcept {
  double w = std::fmod(angle + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

BZGrid::BZGrid(int R, int N) : R_(R), N_(N) {
  if (R < kMinDivisions || N < kMinDivisions) {
    throw Error(ErrorKind::Precondition, "BZGrid: R and N must both be >= " + std::to_string(kMinDivisions) +
                                             " (got " + std::to_string(R) + "x" + std::to_string(N) + ")");
  }
}

double BZGrid::kx(int r) const noexcept {
  const int rr = ((r % R_) + R_) % R_;
  return -kPi + kTwoPi * rr / R_;
}

double BZGrid::ky(int n) const noexcept {
  const int nn = ((n % N_) + N_) % N_;
  return -kPi + kTwoPi * nn / N_;
}

std::size_t BZGrid::index(int r, int n) const noexcept {
  const int rr = ((r % R_) + R_) % R_;
  const int nn = ((n % N_) + N_) % N_;
  return static_cast<std::size_t>(rr) * static_cast<std::size_t>(N_) + static_cast<std::size_t>(nn);
}

}  // namespace bhz
