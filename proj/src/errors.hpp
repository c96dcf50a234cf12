#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bhz {

enum class ErrorKind {
  Precondition,       // malformed numerical input (non-Hermitian, bad grid, ...)
  DegenerateInput,    // rank-deficient vector set
  EnergyGapClosed,
  SpinGapClosed,
  IllConditionedLink, // vanishing U-link overlap
  IntegratorFailure,
  ClosureViolation,   // Delta' != 0 in the microwave mapping
  InconsistentData,   // tomography data outside the physical range
  InvalidInput,
};

const char* to_string(ErrorKind kind) noexcept;

struct KPoint {
  double kx = 0.0;
  double ky = 0.0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<KPoint> where = std::nullopt)
      : std::runtime_error(what), kind_(kind), where_(where) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<KPoint>& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::optional<KPoint> where_;
};

}  // namespace bhz
