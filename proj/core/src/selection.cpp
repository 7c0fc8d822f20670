#include "rankverify/selection.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rankverify/error.hpp"

namespace rankverify {

bool Selection::is_inside(Index idx) const {
  return std::binary_search(inside.begin(), inside.end(), idx);
}

Selection top_k(const GaussianModel& model, int k, TiePolicy ties) {
  const Index n = model.n();
  if (k < 1 || k > n - 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must lie in [1, n-1]; got k = " + std::to_string(k) + ", n = " + std::to_string(n));
  }
  const Vector& x = model.x();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Descending by value; equal values keep ascending index order.
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) > x(b); });

  Selection sel;
  sel.k = k;
  const Index last_in = order[static_cast<std::size_t>(k - 1)];
  const Index first_out = order[static_cast<std::size_t>(k)];
  sel.boundary_gap = x(last_in) - x(first_out);
  if (sel.boundary_gap <= 0.0) {
    if (ties == TiePolicy::kError) {
      throw Error(ErrorCode::kBoundaryTie,
                  "observations " + std::to_string(last_in) + " and " + std::to_string(first_out) +
                      " tie at the top-" + std::to_string(k) + " boundary",
                  {"value = " + std::to_string(x(last_in))});
    }
    sel.tie_broken = true;
  }
  sel.inside.assign(order.begin(), order.begin() + k);
  sel.outside.assign(order.begin() + k, order.end());
  std::sort(sel.inside.begin(), sel.inside.end());
  std::sort(sel.outside.begin(), sel.outside.end());
  return sel;
}

PairStat pair_stat(const GaussianModel& model, const Selection& sel, Index i, Index j,
                   double delta) {
  if (!sel.is_inside(i) || sel.is_inside(j) || j < 0 || j >= model.n()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pair_stat: need i inside and j outside the selection; got (" + std::to_string(i) +
                    ", " + std::to_string(j) + ")");
  }
  PairStat ps;
  ps.i = i;
  ps.j = j;
  ps.delta = delta;
  ps.v = model.pair_scale(i, j);
  ps.d_delta = ((model.x()(i) - model.x()(j)) - delta) / ps.v;
  return ps;
}

double cross_correlation(const GaussianModel& model, IndexPair a, IndexPair b) {
  if (a.i == a.j || b.i == b.j) {
    throw Error(ErrorCode::kInvalidArgument, "cross_correlation: pairs need distinct indices");
  }
  if (a == b) return 1.0;
  const Matrix& s = model.sigma();
  const double cov = s(a.i, b.i) - s(a.i, b.j) - s(a.j, b.i) + s(a.j, b.j);
  const double rho = cov / (model.pair_scale(a.i, a.j) * model.pair_scale(b.i, b.j));
  return std::clamp(rho, -1.0, 1.0);
}

MinPair min_pair(const GaussianModel& model, const Selection& sel, double delta) {
  MinPair best{0, 0, 0.0};
  bool found = false;
  for (Index i : sel.inside) {
    for (Index j : sel.outside) {
      const double d = ((model.x()(i) - model.x()(j)) - delta) / model.pair_scale(i, j);
      // inside/outside are ascending, so strict < keeps the lexicographic minimum.
      if (!found || d < best.d) {
        best = {i, j, d};
        found = true;
      }
    }
  }
  return best;
}

}  // namespace rankverify
