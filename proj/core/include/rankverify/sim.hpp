#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankverify/model.hpp"
#include "rankverify/numerics.hpp"

namespace rankverify {

/// Known means plus covariance for Monte Carlo studies.
struct Scenario {
  std::string name;
  Vector mu;
  Matrix sigma;
  int k = 1;
  /// Indices whose means stand in for +infinity / -infinity. A draw that
  /// selects a pinned-outside index (or drops a pinned-inside one) means
  /// the finite stand-in leaked.
  std::vector<Index> pinned_inside;
  std::vector<Index> pinned_outside;
};

/// n = 5, K = 1 counterexample with strongly negative cross-pair
/// correlations: X1 = Z1 + 5, X2 = sqrt(5) Z2 + 3,
/// Xj = -sqrt(5) Z2 + sqrt(0.1) Zj for j > 2.
Scenario scenario_appendix_a();

inline constexpr double kDefaultSpread = 20.0;

/// Boundary null where mu_K - mu_{K+1} = delta exactly; the means above
/// and below sit at +-spread * max_i sqrt(Sigma_ii).
Scenario scenario_tightness(Index n, int k, double delta, const Matrix& sigma,
                            double spread = kDefaultSpread);

/// reps x n matrix of N(mu, Sigma) draws; row r comes from the same RNG
/// block stream estimate_conditional uses for draw r.
Matrix mvn_sample(const Scenario& scenario, std::int64_t reps, std::uint64_t seed);

enum class Procedure { kFull, kFastOnly, kHsd, kClbExact, kClbFast };
enum class Estimand { kPower, kFalseRejection, kClbCoverage };

std::string_view to_string(Procedure p);
std::string_view to_string(Estimand e);
std::optional<Procedure> procedure_from_string(std::string_view name);
std::optional<Estimand> estimand_from_string(std::string_view name);

struct SimConfig {
  /// Conditioning event: the observed top-k set equals this (sorted) set.
  std::vector<Index> target_s;
  double delta = 0.0;
  Probability alpha{0.1};
  Procedure procedure = Procedure::kFull;
  Estimand estimand = Estimand::kPower;
  /// Total draws; only those landing in the conditioning event count.
  std::int64_t reps = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Draws used for h when procedure is kHsd.
  std::int64_t hsd_reps = 100000;
};

struct SimResult {
  std::string scenario;
  std::int64_t draws = 0;
  /// Draws where the top-k set equalled target_s.
  std::int64_t replicates = 0;
  double conditioning_event_rate = 0.0;
  double conditional_rate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  Probability alpha;
  double delta = 0.0;
  Estimand estimand = Estimand::kPower;
  Procedure procedure = Procedure::kFull;
  std::int64_t pinned_violations = 0;
  std::optional<double> hsd_h;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

inline constexpr std::int64_t kMinConditioningEvents = 50;
inline constexpr std::int64_t kMinSimReps = 100;

/// Conditional rejection rate (power / false rejection) or conditional
/// coverage of a lower bound, estimated over draws whose top-k set equals
/// config.target_s. Throws kInsufficientConditioning below 50 events.
SimResult estimate_conditional(const Scenario& scenario, const SimConfig& config);

/// min_{i in S} mu_i - max_{j not in S} mu_j.
double true_gap(const Vector& mu, const std::vector<Index>& inside);

}  // namespace rankverify
