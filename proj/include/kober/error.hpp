#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kober {

enum class ErrorCode {
  NotPositiveDefinite,
  DimensionMismatch,
  SingularMatrix,
  OutOfRange,
  DomainError,
  Overflow,
  QuadratureNotConverged,
  TailDivergence,
  NonConvergence,
  NonDifferentiable,
  ChainDomainError,
  ProposalDomainError,
  MomentDivergence,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code carries the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kober
