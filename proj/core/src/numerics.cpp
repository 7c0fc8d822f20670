#include "rankverify/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "rankverify/error.hpp"

namespace rankverify {
namespace {

constexpr double kClampSlack = 1e-15;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
// log(sqrt(2 pi))
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
// Above this point log sf switches from erfc to the Mills-ratio form,
// well before erfc leaves the normal double range (x ~ 37.5).
constexpr double kLogTailSwitch = 30.0;

void require_not_nan(double x, const char* what) {
  if (std::isnan(x)) {
    throw Error(ErrorCode::kDomain, std::string(what) + ": argument is NaN");
  }
}

double sf_raw(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (std::isnan(value) || value < -kClampSlack || value > 1.0 + kClampSlack) {
    throw Error(ErrorCode::kDomain,
                "probability out of [0, 1]: " + std::to_string(value));
  }
  value_ = std::clamp(value, 0.0, 1.0);
}

Probability std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::kDomain, "std_normal_cdf: argument is not finite");
  }
  return Probability(sf_raw(-x));
}

Probability std_normal_sf(double x) {
  require_not_nan(x, "std_normal_sf");
  if (x == kInf) return Probability(0.0);
  if (x == -kInf) return Probability(1.0);
  return Probability(sf_raw(x));
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double detail::mills_ratio_cf(double x) {
  // R(x) = 1 / (x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
  // 60 levels is far beyond convergence for x >= 5.
  double t = x;
  for (int k = 60; k >= 1; --k) t = x + k / t;
  return 1.0 / t;
}

double log_std_normal_sf(double x) {
  require_not_nan(x, "log_std_normal_sf");
  if (x == kInf) return -kInf;
  if (x == -kInf) return 0.0;
  if (x < 0.0) return std::log1p(-sf_raw(-x));
  if (x < kLogTailSwitch) return std::log(sf_raw(x));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(detail::mills_ratio_cf(x));
}

double std_normal_quantile(Probability p) {
  const double q = p.value();
  if (q <= 0.0 || q >= 1.0) {
    throw Error(ErrorCode::kDomain, "std_normal_quantile: p must lie in (0, 1)");
  }
  // Phi^{-1}(q) = -sqrt(2) erfc^{-1}(2q); use the upper tail for q > 1/2 so
  // the erfc argument stays small where it matters.
  if (q > 0.5) {
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - q));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_mass(Interval in) {
  require_not_nan(in.lo, "normal_mass");
  require_not_nan(in.hi, "normal_mass");
  if (in.hi <= in.lo) return 0.0;
  if (in.lo >= 0.0) {
    return std_normal_sf(in.lo).value() - std_normal_sf(in.hi).value();
  }
  if (in.hi <= 0.0) {
    return std_normal_sf(-in.hi).value() - std_normal_sf(-in.lo).value();
  }
  return 1.0 - std_normal_sf(-in.lo).value() - std_normal_sf(in.hi).value();
}

double log_normal_mass(Interval in) {
  require_not_nan(in.lo, "log_normal_mass");
  require_not_nan(in.hi, "log_normal_mass");
  if (in.hi <= in.lo) return -kInf;
  if (in.hi <= 0.0) in = Interval{-in.hi, -in.lo};
  if (in.lo < 0.0) return std::log(normal_mass(in));
  const double log_lo = log_std_normal_sf(in.lo);
  const double log_hi = log_std_normal_sf(in.hi);
  return log_lo + std::log(-std::expm1(log_hi - log_lo));
}

namespace {

void check_nested(Interval num, Interval den) {
  for (double v : {num.lo, num.hi, den.lo, den.hi}) require_not_nan(v, "sf_ratio");
  if (!(den.lo <= num.lo && num.lo <= num.hi && num.hi <= den.hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sf_ratio: numerator interval must lie inside the denominator");
  }
  if (!(den.hi > den.lo)) {
    throw Error(ErrorCode::kDegenerateTruncation,
                "sf_ratio: denominator interval has zero width");
  }
}

}  // namespace

double detail::sf_ratio_direct(Interval num, Interval den) {
  return normal_mass(num) / normal_mass(den);
}

double detail::sf_ratio_log(Interval num, Interval den) {
  return std::exp(log_normal_mass(num) - log_normal_mass(den));
}

Probability sf_ratio(Interval num, Interval den) {
  check_nested(num, den);
  double ratio;
  if (normal_mass(den) >= kDirectRatioFloor) {
    ratio = detail::sf_ratio_direct(num, den);
  } else {
    const double log_den = log_normal_mass(den);
    if (log_den == -kInf) {
      throw Error(ErrorCode::kDegenerateTruncation,
                  "sf_ratio: denominator mass underflows even in log space");
    }
    ratio = std::exp(log_normal_mass(num) - log_den);
  }
  return Probability(std::clamp(ratio, 0.0, 1.0));
}

}  // namespace rankverify
