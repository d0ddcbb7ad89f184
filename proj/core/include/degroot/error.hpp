#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degroot {

enum class Errc {
  NegativeEntry,
  RowSumViolation,
  DimensionMismatch,
  NumericalFailure,
  InvalidArgument,
  Unsupported,
  NotStrictlyPositive,
  EigenvectorFailure,
  InvalidProbability,
  NotIid,
  NoConvergence,
  CapHit,
  SingularMass,
  SizeLimit,
  ExplosionGuard,
  BalanceViolation,
  PreconditionUnmet,
  InsufficientEvents,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map outcomes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace degroot
