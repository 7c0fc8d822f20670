#pragma once

#include <cstdint>

#include "rankverify/model.hpp"
#include "rankverify/numerics.hpp"
#include "rankverify/selection.hpp"

namespace rankverify {

/// Monte Carlo estimate of the simultaneous-inference quantile
/// h_{1-alpha} = Quantile(1 - alpha, max_{i != j} |Z_i - Z_j| / v_ij),
/// Z ~ N(0, Sigma).
struct HsdQuantile {
  double h = 0.0;
  Probability alpha;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  /// Half the spread between the order statistics one binomial standard
  /// deviation either side of the quantile rank.
  double std_error = 0.0;
  Index n = 0;
  std::uint64_t sigma_checksum = 0;
  int threads = 1;

  friend bool operator==(const HsdQuantile&, const HsdQuantile&) = default;
};

inline constexpr std::int64_t kDefaultHsdReps = 100000;
inline constexpr std::int64_t kMinHsdReps = 1000;

/// FNV-1a over the raw bytes of the matrix entries (column-major).
std::uint64_t covariance_checksum(const Matrix& sigma);

/// The quantile is the ceil((1 - alpha) * reps)-th order statistic.
HsdQuantile hsd_quantile(const Matrix& sigma, Probability alpha,
                         std::int64_t reps = kDefaultHsdReps, std::uint64_t seed = 0,
                         int threads = 1);

/// Tukey-HSD style decision: x_I >= x_J + v_IJ h for the closest
/// inside/outside pair (I, J) at delta = 0.
bool hsd_verify(const GaussianModel& model, int k, Probability alpha, const HsdQuantile& h,
                TiePolicy ties = TiePolicy::kError);
bool hsd_verify(const GaussianModel& model, const Selection& sel, Probability alpha,
                const HsdQuantile& h);

}  // namespace rankverify
