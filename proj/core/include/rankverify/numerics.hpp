#pragma once

#include <compare>
#include <limits>

namespace rankverify {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A value in [0, 1]. Construction clamps values that overshoot the unit
/// interval by at most 1e-15 and throws ErrorCode::kDomain otherwise.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(Probability, Probability) = default;

 private:
  double value_ = 0.0;
};

/// Closed interval on the extended real line; either end may be +-kInf.
struct Interval {
  double lo;
  double hi;
};

// Standard normal primitives. The survival function is evaluated through
// erfc directly so that upper-tail masses keep full relative precision.
Probability std_normal_cdf(double x);
Probability std_normal_sf(double x);
double std_normal_pdf(double x);
double log_std_normal_sf(double x);
double std_normal_quantile(Probability p);

/// P(lo <= Z <= hi) for Z ~ N(0, 1), evaluated on whichever tail keeps
/// the subtraction well conditioned.
double normal_mass(Interval interval);
double log_normal_mass(Interval interval);

/// Mass of `num` divided by mass of `den`, where num is contained in den.
/// Uses the direct quotient while the denominator is at least
/// kDirectRatioFloor and a log-space tail evaluation below it.
Probability sf_ratio(Interval num, Interval den);

inline constexpr double kDirectRatioFloor = 1e-250;

namespace detail {
double sf_ratio_direct(Interval num, Interval den);
double sf_ratio_log(Interval num, Interval den);
/// (1 - Phi(x)) / phi(x) by continued fraction; accurate for x >= 5.
double mills_ratio_cf(double x);
}  // namespace detail

}  // namespace rankverify
