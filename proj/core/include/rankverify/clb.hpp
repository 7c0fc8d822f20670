#pragma once

#include <optional>
#include <string_view>

#include "rankverify/model.hpp"
#include "rankverify/numerics.hpp"
#include "rankverify/selection.hpp"

namespace rankverify {

class RankVerifier;

enum class ClbMethod { kExact, kFast };
enum class BoundKind { kFinite, kMinusInfinity, kUnbounded };

std::string_view to_string(ClbMethod method);
std::string_view to_string(BoundKind kind);
std::optional<ClbMethod> clb_method_from_string(std::string_view name);
std::optional<BoundKind> bound_kind_from_string(std::string_view name);

/// Lower confidence bound on min_{i in S} mu_i - max_{j not in S} mu_j,
/// valid conditional on the selected set.
struct LowerBound {
  BoundKind kind = BoundKind::kFinite;
  /// Meaningful only for kFinite; -inf / +inf mirror the other kinds.
  double value = 0.0;
  Probability alpha;
  ClbMethod method = ClbMethod::kExact;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tol = 0.0;

  friend bool operator==(const LowerBound&, const LowerBound&) = default;
};

/// 1e-8 * (1 + max|x|).
double default_clb_tolerance(const GaussianModel& model);

inline constexpr int kMaxBracketExpansions = 60;

/// Inverts the full test in delta by bisection. The bisection keeps
/// "rejects at bracket_lo, fails at bracket_hi" and stops once the bracket
/// is no wider than tol; the reported value is its midpoint.
LowerBound clb_exact(const GaussianModel& model, int k, Probability alpha,
                     std::optional<double> tol = std::nullopt,
                     TiePolicy ties = TiePolicy::kError);
LowerBound clb_exact(const RankVerifier& verifier, Probability alpha,
                     std::optional<double> tol = std::nullopt);

/// Closed-form bound from the fast check: -inf unless the fast check
/// passes at delta = 0, else min_{i,j} [x_i - x_j - v_ij z_{1-alpha/2}].
LowerBound clb_fast(const GaussianModel& model, int k, Probability alpha,
                    TiePolicy ties = TiePolicy::kError);
LowerBound clb_fast(const GaussianModel& model, const Selection& sel, Probability alpha);

}  // namespace rankverify
