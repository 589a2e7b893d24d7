#include "kober/error.hpp"

namespace kober {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::TailDivergence: return "TailDivergence";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonDifferentiable: return "NonDifferentiable";
    case ErrorCode::ChainDomainError: return "ChainDomainError";
    case ErrorCode::ProposalDomainError: return "ProposalDomainError";
    case ErrorCode::MomentDivergence: return "MomentDivergence";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace kober
