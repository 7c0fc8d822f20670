#pragma once

#include <compare>
#include <vector>

#include "rankverify/model.hpp"

namespace rankverify {

enum class TiePolicy {
  kError,          // a tie at the k/(k+1) boundary is an error
  kBreakLowIndex,  // the lower index wins the tie; the selection is flagged
};

struct IndexPair {
  Index i = 0;
  Index j = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Indices of the k largest observations (inside) and the rest (outside),
/// both sorted ascending.
struct Selection {
  int k = 0;
  std::vector<Index> inside;
  std::vector<Index> outside;
  /// X_(k) - X_(k+1) in descending order statistics; zero only when a tie
  /// was broken.
  double boundary_gap = 0.0;
  bool tie_broken = false;

  bool is_inside(Index idx) const;
  std::size_t pair_count() const { return inside.size() * outside.size(); }
};

Selection top_k(const GaussianModel& model, int k, TiePolicy ties = TiePolicy::kError);

/// Standardized difference of one inside/outside pair at margin delta.
struct PairStat {
  Index i = 0;
  Index j = 0;
  double v = 0.0;        // sqrt(Var(X_i - X_j))
  double d_delta = 0.0;  // ((x_i - x_j) - delta) / v
  double delta = 0.0;
};

PairStat pair_stat(const GaussianModel& model, const Selection& sel, Index i, Index j,
                   double delta);

/// Correlation between D_ij and D_kl. Exactly 1 for the same ordered pair.
double cross_correlation(const GaussianModel& model, IndexPair a, IndexPair b);

struct MinPair {
  Index i = 0;
  Index j = 0;
  double d = 0.0;
};

/// Inside/outside pair with the smallest standardized difference at delta.
/// Ties resolve to the lexicographically smallest (i, j).
MinPair min_pair(const GaussianModel& model, const Selection& sel, double delta);

}  // namespace rankverify
