#include "rankverify/error.hpp"

namespace rankverify {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kBoundaryTie: return "boundary-tie";
    case ErrorCode::kDegenerateTruncation: return "degenerate-truncation";
    case ErrorCode::kInternalInconsistency: return "internal-inconsistency";
    case ErrorCode::kNotPositiveSemidefinite: return "not-psd";
    case ErrorCode::kCovarianceMismatch: return "covariance-mismatch";
    case ErrorCode::kInsufficientConditioning: return "insufficient-conditioning";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::vector<std::string> details)
    : std::runtime_error(message), code_(code), details_(std::move(details)) {}

}  // namespace rankverify
