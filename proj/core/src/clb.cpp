#include "rankverify/clb.hpp"

#include <algorithm>
#include <cmath>

#include "rankverify/error.hpp"
#include "rankverify/verifier.hpp"

namespace rankverify {

std::string_view to_string(ClbMethod method) {
  return method == ClbMethod::kExact ? "exact" : "fast";
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kFinite: return "finite";
    case BoundKind::kMinusInfinity: return "minus-infinity";
    case BoundKind::kUnbounded: return "unbounded";
  }
  return "finite";
}

std::optional<ClbMethod> clb_method_from_string(std::string_view name) {
  if (name == "exact") return ClbMethod::kExact;
  if (name == "fast") return ClbMethod::kFast;
  return std::nullopt;
}

std::optional<BoundKind> bound_kind_from_string(std::string_view name) {
  for (auto k : {BoundKind::kFinite, BoundKind::kMinusInfinity, BoundKind::kUnbounded}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double default_clb_tolerance(const GaussianModel& model) {
  return 1e-8 * (1.0 + model.x().cwiseAbs().maxCoeff());
}

LowerBound clb_exact(const RankVerifier& verifier, Probability alpha, std::optional<double> tol) {
  const GaussianModel& model = verifier.model();
  const double width_tol = tol.value_or(default_clb_tolerance(model));
  if (!(width_tol > 0.0) || !std::isfinite(width_tol)) {
    throw Error(ErrorCode::kInvalidArgument, "clb tolerance must be positive and finite");
  }

  LowerBound out;
  out.alpha = alpha;
  out.method = ClbMethod::kExact;
  out.tol = width_tol;

  const Vector& x = model.x();
  const double range = x.maxCoeff() - x.minCoeff();
  const double pad = 10.0 * model.max_pair_scale();
  double lo = -range - pad;
  double hi = range + pad;
  int iterations = 0;

  // Fail-to-reject is an up-set in delta: push hi up until the test fails
  // there and lo down until it rejects there.
  double step = hi - lo;
  bool hi_rejects = verifier.rejects(hi, alpha);
  for (int e = 0; hi_rejects && e < kMaxBracketExpansions; ++e) {
    lo = hi;
    hi += step;
    step *= 2.0;
    ++iterations;
    hi_rejects = verifier.rejects(hi, alpha);
  }
  if (hi_rejects) {
    out.kind = BoundKind::kUnbounded;
    out.value = kInf;
    out.bracket_lo = hi;
    out.bracket_hi = kInf;
    out.iterations = iterations;
    return out;
  }

  step = hi - lo;
  bool lo_rejects = verifier.rejects(lo, alpha);
  for (int e = 0; !lo_rejects && e < kMaxBracketExpansions; ++e) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    ++iterations;
    lo_rejects = verifier.rejects(lo, alpha);
  }
  if (!lo_rejects) {
    out.kind = BoundKind::kMinusInfinity;
    out.value = -kInf;
    out.bracket_lo = -kInf;
    out.bracket_hi = lo;
    out.iterations = iterations;
    return out;
  }

  while (hi - lo > width_tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (verifier.rejects(mid, alpha)) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  out.kind = BoundKind::kFinite;
  out.value = lo + 0.5 * (hi - lo);
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.iterations = iterations;
  return out;
}

LowerBound clb_exact(const GaussianModel& model, int k, Probability alpha,
                     std::optional<double> tol, TiePolicy ties) {
  return clb_exact(RankVerifier(model, k, ties), alpha, tol);
}

LowerBound clb_fast(const GaussianModel& model, const Selection& sel, Probability alpha) {
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  LowerBound out;
  out.alpha = alpha;
  out.method = ClbMethod::kFast;

  const MinPair at_zero = min_pair(model, sel, 0.0);
  if (std_normal_sf(at_zero.d).value() > alpha.value() / 2.0) {
    out.kind = BoundKind::kMinusInfinity;
    out.value = -kInf;
    out.bracket_lo = -kInf;
    out.bracket_hi = -kInf;
    return out;
  }
  const double z = std_normal_quantile(Probability(1.0 - alpha.value() / 2.0));
  double best = kInf;
  for (Index i : sel.inside) {
    for (Index j : sel.outside) {
      best = std::min(best, model.x()(i) - model.x()(j) - model.pair_scale(i, j) * z);
    }
  }
  out.kind = BoundKind::kFinite;
  out.value = best;
  out.bracket_lo = best;
  out.bracket_hi = best;
  return out;
}

LowerBound clb_fast(const GaussianModel& model, int k, Probability alpha, TiePolicy ties) {
  return clb_fast(model, top_k(model, k, ties), alpha);
}

}  // namespace rankverify
