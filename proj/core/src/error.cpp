#include "degroot/error.hpp"

namespace degroot {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::RowSumViolation: return "RowSumViolation";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Unsupported: return "Unsupported";
    case Errc::NotStrictlyPositive: return "NotStrictlyPositive";
    case Errc::EigenvectorFailure: return "EigenvectorFailure";
    case Errc::InvalidProbability: return "InvalidProbability";
    case Errc::NotIid: return "NotIid";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::CapHit: return "CapHit";
    case Errc::SingularMass: return "SingularMass";
    case Errc::SizeLimit: return "SizeLimit";
    case Errc::ExplosionGuard: return "ExplosionGuard";
    case Errc::BalanceViolation: return "BalanceViolation";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::InsufficientEvents: return "InsufficientEvents";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace degroot
