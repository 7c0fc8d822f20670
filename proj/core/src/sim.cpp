#include "rankverify/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rankverify/baselines.hpp"
#include "rankverify/clb.hpp"
#include "rankverify/error.hpp"
#include "rankverify/sampling.hpp"
#include "rankverify/selection.hpp"
#include "rankverify/verifier.hpp"

namespace rankverify {

Scenario scenario_appendix_a() {
  const double sigma1 = 1.0;
  const double sigma2 = std::sqrt(5.0);
  const double sigma3 = std::sqrt(0.1);
  constexpr Index n = 5;

  // X = mu + A Z with independent standard normal Z.
  Matrix loading = Matrix::Zero(n, n);
  loading(0, 0) = sigma1;
  loading(1, 1) = sigma2;
  for (Index j = 2; j < n; ++j) {
    loading(j, 1) = -sigma2;
    loading(j, j) = sigma3;
  }

  Scenario s;
  s.name = "appendix-a";
  s.mu = Vector(n);
  s.mu << 5.0, 3.0, 0.0, 0.0, 0.0;
  s.sigma = loading * loading.transpose();
  s.k = 1;
  return s;
}

Scenario scenario_tightness(Index n, int k, double delta, const Matrix& sigma, double spread) {
  if (n < 2 || k < 1 || k > n - 1) {
    throw Error(ErrorCode::kInvalidArgument, "scenario_tightness: need n >= 2 and 1 <= k <= n-1");
  }
  if (sigma.rows() != n || sigma.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "scenario_tightness: covariance must be n x n");
  }
  if (!(spread > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scenario_tightness: spread must be positive");

  const double scale = std::sqrt(sigma.diagonal().maxCoeff());
  Scenario s;
  s.name = "tightness";
  s.sigma = sigma;
  s.k = k;
  s.mu = Vector(n);
  for (Index i = 0; i < n; ++i) {
    if (i < k - 1) {
      s.mu(i) = spread * scale;
      s.pinned_inside.push_back(i);
    } else if (i == k - 1) {
      s.mu(i) = delta;
    } else if (i == k) {
      s.mu(i) = 0.0;
    } else {
      s.mu(i) = -spread * scale;
      s.pinned_outside.push_back(i);
    }
  }
  return s;
}

Matrix mvn_sample(const Scenario& scenario, std::int64_t reps, std::uint64_t seed) {
  const MvnSampler sampler(scenario.mu, scenario.sigma);
  const Index n = sampler.dim();
  Matrix out(reps, n);
  for_each_block(reps, 1, [&](std::int64_t block, std::int64_t begin, std::int64_t end) {
    auto rng = block_rng(seed, static_cast<std::uint64_t>(block));
    Vector x(n), scratch(n);
    for (std::int64_t r = begin; r < end; ++r) {
      sampler.draw(rng, x, scratch);
      out.row(r) = x.transpose();
    }
  });
  return out;
}

std::string_view to_string(Procedure p) {
  switch (p) {
    case Procedure::kFull: return "full";
    case Procedure::kFastOnly: return "fast-only";
    case Procedure::kHsd: return "hsd";
    case Procedure::kClbExact: return "exact";
    case Procedure::kClbFast: return "fast";
  }
  return "full";
}

std::string_view to_string(Estimand e) {
  switch (e) {
    case Estimand::kPower: return "power";
    case Estimand::kFalseRejection: return "false-rejection";
    case Estimand::kClbCoverage: return "clb-coverage";
  }
  return "power";
}

std::optional<Procedure> procedure_from_string(std::string_view name) {
  for (auto p : {Procedure::kFull, Procedure::kFastOnly, Procedure::kHsd, Procedure::kClbExact,
                 Procedure::kClbFast}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<Estimand> estimand_from_string(std::string_view name) {
  for (auto e : {Estimand::kPower, Estimand::kFalseRejection, Estimand::kClbCoverage}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

double true_gap(const Vector& mu, const std::vector<Index>& inside) {
  double min_in = kInf;
  double max_out = -kInf;
  for (Index i = 0; i < mu.size(); ++i) {
    if (std::binary_search(inside.begin(), inside.end(), i)) {
      min_in = std::min(min_in, mu(i));
    } else {
      max_out = std::max(max_out, mu(i));
    }
  }
  return min_in - max_out;
}

namespace {

void check_config(const Scenario& sc, const SimConfig& cfg, const std::vector<Index>& target) {
  const Index n = sc.mu.size();
  if (sc.sigma.rows() != n || sc.sigma.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "scenario: mu and sigma sizes differ");
  }
  if (cfg.reps < kMinSimReps) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulation needs at least " + std::to_string(kMinSimReps) + " reps");
  }
  if (target.size() != static_cast<std::size_t>(sc.k)) {
    throw Error(ErrorCode::kInvalidArgument, "target set size must equal the scenario's k");
  }
  if (std::adjacent_find(target.begin(), target.end()) != target.end() ||
      target.front() < 0 || target.back() >= n) {
    throw Error(ErrorCode::kInvalidArgument, "target set has duplicate or out-of-range indices");
  }

  const bool is_clb = cfg.procedure == Procedure::kClbExact || cfg.procedure == Procedure::kClbFast;
  if ((cfg.estimand == Estimand::kClbCoverage) != is_clb) {
    throw Error(ErrorCode::kInvalidArgument,
                "clb-coverage pairs with the exact/fast bound procedures, and only with them");
  }
  if (cfg.procedure == Procedure::kHsd && cfg.delta != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "the HSD baseline is defined for delta = 0 only");
  }
  if (cfg.estimand == Estimand::kFalseRejection && !(true_gap(sc.mu, target) <= cfg.delta)) {
    std::ostringstream os;
    os << "false-rejection needs the union null to hold on the target set, but the true gap "
       << true_gap(sc.mu, target) << " exceeds delta " << cfg.delta;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

struct BlockCounts {
  std::int64_t events = 0;
  std::int64_t successes = 0;
  std::int64_t leaks = 0;
};

}  // namespace

SimResult estimate_conditional(const Scenario& scenario, const SimConfig& config) {
  std::vector<Index> target = config.target_s;
  std::sort(target.begin(), target.end());
  if (target.empty()) throw Error(ErrorCode::kInvalidArgument, "target set is empty");
  check_config(scenario, config, target);

  const Index n = scenario.mu.size();
  const GaussianModel base = validate(scenario.mu, scenario.sigma);
  const MvnSampler sampler(scenario.mu, base.sigma());
  const double gap = true_gap(scenario.mu, target);

  std::optional<HsdQuantile> hsd;
  if (config.procedure == Procedure::kHsd) {
    // Separate stream from the data draws.
    hsd = hsd_quantile(base.sigma(), config.alpha, config.hsd_reps, config.seed ^ 0x9e3779b97f4a7c15ull,
                       config.threads);
  }

  const std::int64_t blocks = (config.reps + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<BlockCounts> counts(static_cast<std::size_t>(blocks));

  for_each_block(config.reps, config.threads, [&](std::int64_t block, std::int64_t begin,
                                                  std::int64_t end) {
    auto rng = block_rng(config.seed, static_cast<std::uint64_t>(block));
    BlockCounts c;
    Vector x(n), scratch(n);
    for (std::int64_t r = begin; r < end; ++r) {
      sampler.draw(rng, x, scratch);
      const GaussianModel model = base.with_observations(x);
      Selection sel;
      try {
        sel = top_k(model, scenario.k);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kBoundaryTie) continue;
        throw;
      }
      for (Index i : scenario.pinned_inside) c.leaks += sel.is_inside(i) ? 0 : 1;
      for (Index j : scenario.pinned_outside) c.leaks += sel.is_inside(j) ? 1 : 0;
      if (sel.inside != target) continue;
      ++c.events;

      bool success = false;
      switch (config.procedure) {
        case Procedure::kFull:
          success = RankVerifier(model, sel).rejects(config.delta, config.alpha);
          break;
        case Procedure::kFastOnly:
          success = RankVerifier(model, sel).fast_check(config.delta, config.alpha).passes;
          break;
        case Procedure::kHsd:
          success = hsd_verify(model, sel, config.alpha, *hsd);
          break;
        case Procedure::kClbExact:
        case Procedure::kClbFast: {
          const LowerBound lb = config.procedure == Procedure::kClbExact
                                    ? clb_exact(RankVerifier(model, sel), config.alpha)
                                    : clb_fast(model, sel, config.alpha);
          success = lb.kind == BoundKind::kMinusInfinity ||
                    (lb.kind == BoundKind::kFinite && gap >= lb.value);
          break;
        }
      }
      if (success) ++c.successes;
    }
    counts[static_cast<std::size_t>(block)] = c;
  });

  BlockCounts total;
  for (const BlockCounts& c : counts) {
    total.events += c.events;
    total.successes += c.successes;
    total.leaks += c.leaks;
  }

  const double rate = static_cast<double>(total.events) / static_cast<double>(config.reps);
  if (total.events < kMinConditioningEvents) {
    std::ostringstream os;
    os << "only " << total.events << " of " << config.reps
       << " draws selected the target set; need at least " << kMinConditioningEvents;
    std::ostringstream rate_s;
    rate_s.precision(17);
    rate_s << "event_rate=" << rate;
    throw Error(ErrorCode::kInsufficientConditioning, os.str(),
                {"events=" + std::to_string(total.events), rate_s.str()});
  }

  SimResult out;
  out.scenario = scenario.name;
  out.draws = config.reps;
  out.replicates = total.events;
  out.conditioning_event_rate = rate;
  out.conditional_rate =
      static_cast<double>(total.successes) / static_cast<double>(total.events);
  out.std_error = std::sqrt(out.conditional_rate * (1.0 - out.conditional_rate) /
                            static_cast<double>(total.events));
  out.seed = config.seed;
  out.alpha = config.alpha;
  out.delta = config.delta;
  out.estimand = config.estimand;
  out.procedure = config.procedure;
  out.pinned_violations = total.leaks;
  if (hsd) out.hsd_h = hsd->h;
  return out;
}

}  // namespace rankverify
