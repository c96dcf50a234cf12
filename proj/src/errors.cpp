#include "errors.hpp"

namespace bhz {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::EnergyGapClosed: return "energy-gap-closed";
    case ErrorKind::SpinGapClosed: return "spin-gap-closed";
    case ErrorKind::IllConditionedLink: return "ill-conditioned-link";
    case ErrorKind::IntegratorFailure: return "integrator-failure";
    case ErrorKind::ClosureViolation: return "closure-violation";
    case ErrorKind::InconsistentData: return "inconsistent-data";
    case ErrorKind::InvalidInput: return "invalid-input";
  }
  return "unknown";
}

}  // namespace bhz
