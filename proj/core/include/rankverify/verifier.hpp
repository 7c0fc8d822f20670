#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankverify/model.hpp"
#include "rankverify/numerics.hpp"
#include "rankverify/selection.hpp"

namespace rankverify {

enum class Method { kFull, kFastOnly };

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

/// Correlations with |rho| below this are treated as exactly zero: such a
/// pair's selection constraint does not involve D_ij at all.
inline constexpr double kZeroCorrelationThreshold = 1e-12;
/// Allowed overshoot of the observed statistic past its truncation bounds.
inline constexpr double kContainmentSlack = 1e-9;

/// Selective p-value of H_ij: mu_i - mu_j <= delta, conditional on the
/// observed top-k set. D^delta_ij is a standard normal truncated to
/// [trunc_lo, trunc_hi] under the boundary null.
struct SelectivePValue {
  Index i = 0;
  Index j = 0;
  Probability p;
  double trunc_lo = -kInf;
  double trunc_hi = kInf;
  double d_delta = 0.0;

  friend bool operator==(const SelectivePValue&, const SelectivePValue&) = default;
};

/// Sufficient check on the closest inside/outside pair at delta+ = max(delta, 0).
struct FastCheckResult {
  Index i = 0;
  Index j = 0;
  double d_plus = 0.0;
  Probability p_two_sided;  // min(1, 2 sf(d_plus))
  bool passes = false;      // sf(d_plus) <= alpha / 2

  friend bool operator==(const FastCheckResult&, const FastCheckResult&) = default;
};

struct VerificationReport {
  bool reject = false;
  Probability alpha;
  double delta = 0.0;
  int k = 0;
  Method method = Method::kFull;
  std::vector<Index> selected;
  IndexPair worst_pair;
  Probability worst_p;
  /// Set for Method::kFastOnly, where worst_p is the two-sided fast
  /// p-value, an upper bound on the full test's statistic.
  bool worst_p_is_upper_bound = false;
  /// Lexicographic by (i, j). May be partial when early exit fired.
  std::vector<SelectivePValue> all_pairs;
  std::size_t pairs_total = 0;
  bool early_exit = false;
  FastCheckResult fast_check;
  /// Covariance family when the full test provably reduces to the fast
  /// check at delta = 0.
  std::optional<CovFamilyTag> reduction_detected;
  /// Cross-pair correlations treated as zero while building truncation bounds.
  std::size_t zero_correlation_pairs = 0;
  bool tie_broken = false;
  std::vector<std::string> warnings;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

struct VerifyOptions {
  TiePolicy ties = TiePolicy::kError;
  /// Stop at the first pair whose p-value exceeds alpha.
  bool early_exit = false;
};

/// Selection-conditional rank verification for one (model, top-k set).
/// Pair scales and observed gaps are cached, so testing many deltas (as
/// confidence-bound inversion does) only pays for the O(K^2 (n-K)^2) scan.
class RankVerifier {
 public:
  RankVerifier(GaussianModel model, Selection selection);
  RankVerifier(GaussianModel model, int k, TiePolicy ties = TiePolicy::kError);

  const GaussianModel& model() const noexcept { return model_; }
  const Selection& selection() const noexcept { return selection_; }

  SelectivePValue selective_p_value(Index i, Index j, double delta) const;
  FastCheckResult fast_check(double delta, Probability alpha) const;

  /// Full-test decision with early exit; the hot path for simulation and
  /// bound inversion.
  bool rejects(double delta, Probability alpha) const;

  VerificationReport verify(double delta, Probability alpha, Method method,
                            bool early_exit = false) const;

 private:
  struct PairEntry {
    Index i;
    Index j;
    double v;
    double gap;  // x_i - x_j
  };

  SelectivePValue evaluate(std::size_t a, double delta, std::size_t* zero_rho) const;
  std::vector<std::size_t> order_by_statistic(double delta) const;

  GaussianModel model_;
  Selection selection_;
  std::vector<PairEntry> pairs_;
};

SelectivePValue selective_p_value(const GaussianModel& model, const Selection& sel, Index i,
                                  Index j, double delta);

FastCheckResult fast_check(const GaussianModel& model, const Selection& sel, double delta,
                           Probability alpha);

VerificationReport verify(const GaussianModel& model, int k, double delta, Probability alpha,
                          Method method = Method::kFull, const VerifyOptions& options = {});

/// Whether the full test at delta = 0 coincides with the fast check for
/// this covariance family and k.
bool reduction_applies(const CovFamilyTag& tag, int k, Index n);

}  // namespace rankverify
