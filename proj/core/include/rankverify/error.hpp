#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankverify {

enum class ErrorCode {
  kDomain,                   // NaN / out-of-range argument to a numeric primitive
  kInvalidArgument,          // precondition on sizes, k, alpha, tol, ...
  kValidation,               // GaussianModel invariants violated
  kBoundaryTie,              // X_(k) == X_(k+1), selection event ill-defined
  kDegenerateTruncation,     // zero-width truncation interval
  kInternalInconsistency,    // selection event contradicts the observed data
  kNotPositiveSemidefinite,  // sampling requested on a non-PSD covariance
  kCovarianceMismatch,       // quantile computed for a different covariance
  kInsufficientConditioning, // too few draws landed in the conditioning event
  kParse,                    // malformed input document
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `details` carries one line per violated
/// invariant when several are detected at once (e.g. model validation).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace rankverify
