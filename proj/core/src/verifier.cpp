#include "rankverify/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rankverify/error.hpp"

namespace rankverify {
namespace {

void require_alpha(Probability alpha) {
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::kFull ? "full" : "fast-only";
}

std::optional<Method> method_from_string(std::string_view name) {
  if (name == "full") return Method::kFull;
  if (name == "fast" || name == "fast-only") return Method::kFastOnly;
  return std::nullopt;
}

RankVerifier::RankVerifier(GaussianModel model, Selection selection)
    : model_(std::move(model)), selection_(std::move(selection)) {
  pairs_.reserve(selection_.pair_count());
  const Vector& x = model_.x();
  for (Index i : selection_.inside) {
    for (Index j : selection_.outside) {
      pairs_.push_back({i, j, model_.pair_scale(i, j), x(i) - x(j)});
    }
  }
}

RankVerifier::RankVerifier(GaussianModel model, int k, TiePolicy ties)
    : RankVerifier(model, top_k(model, k, ties)) {}

SelectivePValue RankVerifier::evaluate(std::size_t a, double delta,
                                       std::size_t* zero_rho) const {
  const Matrix& s = model_.sigma();
  const PairEntry& pa = pairs_[a];
  const double d = (pa.gap - delta) / pa.v;

  double lo = -kInf;
  double hi = kInf;
  for (std::size_t b = 0; b < pairs_.size(); ++b) {
    const PairEntry& pb = pairs_[b];
    double rho = 1.0;
    if (b != a) {
      rho = (s(pa.i, pb.i) - s(pa.i, pb.j) - s(pa.j, pb.i) + s(pa.j, pb.j)) / (pa.v * pb.v);
    }
    if (std::abs(rho) < kZeroCorrelationThreshold) {
      if (zero_rho != nullptr) ++*zero_rho;
      continue;
    }
    // X_k > X_l rewritten as a bound on D^delta_ij.
    const double bound = d - (pb.gap / pb.v) / rho;
    if (rho > 0.0) {
      lo = std::max(lo, bound);
    } else {
      hi = std::min(hi, bound);
    }
  }

  if (lo > d + kContainmentSlack || hi < d - kContainmentSlack) {
    std::ostringstream os;
    os << "observed statistic " << d << " for pair (" << pa.i << ", " << pa.j
       << ") lies outside its truncation interval [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::kInternalInconsistency, os.str());
  }
  if (!(hi > lo)) {
    std::ostringstream os;
    os << "truncation interval for pair (" << pa.i << ", " << pa.j << ") is degenerate: [" << lo
       << ", " << hi << "]";
    throw Error(ErrorCode::kDegenerateTruncation, os.str());
  }

  SelectivePValue out;
  out.i = pa.i;
  out.j = pa.j;
  out.d_delta = d;
  out.trunc_lo = lo;
  out.trunc_hi = hi;
  const double dc = std::clamp(d, lo, hi);
  out.p = sf_ratio(Interval{dc, hi}, Interval{lo, hi});
  return out;
}

SelectivePValue RankVerifier::selective_p_value(Index i, Index j, double delta) const {
  const auto in_it = std::lower_bound(selection_.inside.begin(), selection_.inside.end(), i);
  const auto out_it = std::lower_bound(selection_.outside.begin(), selection_.outside.end(), j);
  if (in_it == selection_.inside.end() || *in_it != i || out_it == selection_.outside.end() ||
      *out_it != j) {
    throw Error(ErrorCode::kInvalidArgument,
                "selective_p_value: need i inside and j outside the selection; got (" +
                    std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  const auto a = static_cast<std::size_t>(in_it - selection_.inside.begin()) *
                     selection_.outside.size() +
                 static_cast<std::size_t>(out_it - selection_.outside.begin());
  return evaluate(a, delta, nullptr);
}

FastCheckResult RankVerifier::fast_check(double delta, Probability alpha) const {
  require_alpha(alpha);
  const double delta_plus = std::max(delta, 0.0);
  const MinPair mp = min_pair(model_, selection_, delta_plus);
  FastCheckResult out;
  out.i = mp.i;
  out.j = mp.j;
  out.d_plus = mp.d;
  const double sf = std_normal_sf(mp.d).value();
  out.p_two_sided = Probability(std::min(1.0, 2.0 * sf));
  out.passes = sf <= alpha.value() / 2.0;
  return out;
}

std::vector<std::size_t> RankVerifier::order_by_statistic(double delta) const {
  std::vector<std::size_t> order(pairs_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Smallest standardized differences carry the largest p-values.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (pairs_[a].gap - delta) / pairs_[a].v < (pairs_[b].gap - delta) / pairs_[b].v;
  });
  return order;
}

bool RankVerifier::rejects(double delta, Probability alpha) const {
  require_alpha(alpha);
  for (std::size_t a : order_by_statistic(delta)) {
    if (evaluate(a, delta, nullptr).p > alpha) return false;
  }
  return true;
}

VerificationReport RankVerifier::verify(double delta, Probability alpha, Method method,
                                        bool early_exit) const {
  require_alpha(alpha);
  VerificationReport rep;
  rep.alpha = alpha;
  rep.delta = delta;
  rep.k = selection_.k;
  rep.method = method;
  rep.selected = selection_.inside;
  rep.pairs_total = pairs_.size();
  rep.tie_broken = selection_.tie_broken;
  if (selection_.tie_broken) {
    rep.warnings.emplace_back(
        "boundary tie broken toward the lower index; the selection event has probability zero "
        "under the model");
  }
  if (!model_.positive_semidefinite()) {
    rep.warnings.emplace_back(
        "covariance is not positive semi-definite; no Gaussian generates such data");
  }

  rep.fast_check = fast_check(delta, alpha);
  const CovFamilyTag tag = classify_covariance(model_.sigma());
  if (reduction_applies(tag, selection_.k, model_.n())) rep.reduction_detected = tag;

  if (method == Method::kFastOnly) {
    rep.reject = rep.fast_check.passes;
    rep.worst_pair = {rep.fast_check.i, rep.fast_check.j};
    rep.worst_p = rep.fast_check.p_two_sided;
    rep.worst_p_is_upper_bound = true;
    return rep;
  }

  bool have_worst = false;
  for (std::size_t a : order_by_statistic(delta)) {
    SelectivePValue sp = evaluate(a, delta, &rep.zero_correlation_pairs);
    const IndexPair pair{sp.i, sp.j};
    if (!have_worst || sp.p > rep.worst_p || (sp.p == rep.worst_p && pair < rep.worst_pair)) {
      rep.worst_p = sp.p;
      rep.worst_pair = pair;
      have_worst = true;
    }
    rep.all_pairs.push_back(sp);
    if (early_exit && sp.p > alpha) {
      rep.early_exit = rep.all_pairs.size() < pairs_.size();
      break;
    }
  }
  std::sort(rep.all_pairs.begin(), rep.all_pairs.end(),
            [](const SelectivePValue& a, const SelectivePValue& b) {
              return IndexPair{a.i, a.j} < IndexPair{b.i, b.j};
            });
  rep.reject = rep.all_pairs.size() == pairs_.size() && rep.worst_p <= alpha;
  return rep;
}

SelectivePValue selective_p_value(const GaussianModel& model, const Selection& sel, Index i,
                                  Index j, double delta) {
  return RankVerifier(model, sel).selective_p_value(i, j, delta);
}

FastCheckResult fast_check(const GaussianModel& model, const Selection& sel, double delta,
                           Probability alpha) {
  return RankVerifier(model, sel).fast_check(delta, alpha);
}

VerificationReport verify(const GaussianModel& model, int k, double delta, Probability alpha,
                          Method method, const VerifyOptions& options) {
  return RankVerifier(model, k, options.ties).verify(delta, alpha, method, options.early_exit);
}

bool reduction_applies(const CovFamilyTag& tag, int k, Index n) {
  switch (tag.kind) {
    case CovFamily::kDiagonal:
    case CovFamily::kEquicorrelated:
      return true;
    case CovFamily::kAr1:
      return tag.parameter.has_value() && std::abs(*tag.parameter) <= 0.5 &&
             (k == 1 || k == n - 1);
    case CovFamily::kMultinomialApprox:
      return k == 1;
    case CovFamily::kGeneral:
      return false;
  }
  return false;
}

}  // namespace rankverify
