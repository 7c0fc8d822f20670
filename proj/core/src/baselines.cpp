#include "rankverify/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "rankverify/error.hpp"
#include "rankverify/sampling.hpp"

namespace rankverify {

std::uint64_t covariance_checksum(const Matrix& sigma) {
  std::uint64_t hash = 14695981039346656037ull;
  auto mix = [&](const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t b = 0; b < size; ++b) {
      hash ^= bytes[b];
      hash *= 1099511628211ull;
    }
  };
  const std::int64_t dims[2] = {sigma.rows(), sigma.cols()};
  mix(dims, sizeof dims);
  mix(sigma.data(), static_cast<std::size_t>(sigma.size()) * sizeof(double));
  return hash;
}

HsdQuantile hsd_quantile(const Matrix& sigma_in, Probability alpha, std::int64_t reps,
                         std::uint64_t seed, int threads) {
  const Index n = sigma_in.rows();
  if (n < 2 || sigma_in.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "hsd_quantile: need a square covariance with n >= 2");
  }
  // Same symmetrization as model validation, so checksums match the model's matrix.
  const Matrix sigma = (0.5 * (sigma_in + sigma_in.transpose())).eval();
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  if (reps < kMinHsdReps) {
    throw Error(ErrorCode::kInvalidArgument,
                "hsd_quantile: reps must be at least " + std::to_string(kMinHsdReps));
  }

  Matrix inv_scale = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v2 = sigma(i, i) - 2.0 * sigma(i, j) + sigma(j, j);
      if (!(v2 > 0.0)) {
        throw Error(ErrorCode::kValidation, "hsd_quantile: pair (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ") is perfectly correlated");
      }
      inv_scale(i, j) = 1.0 / std::sqrt(v2);
    }
  }

  const MvnSampler sampler(Vector::Zero(n), sigma);
  std::vector<double> maxima(static_cast<std::size_t>(reps));
  for_each_block(reps, threads, [&](std::int64_t block, std::int64_t begin, std::int64_t end) {
    auto rng = block_rng(seed, static_cast<std::uint64_t>(block));
    Vector z(n), scratch(n);
    for (std::int64_t r = begin; r < end; ++r) {
      sampler.draw(rng, z, scratch);
      double m = 0.0;
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          m = std::max(m, std::abs(z(i) - z(j)) * inv_scale(i, j));
        }
      }
      maxima[static_cast<std::size_t>(r)] = m;
    }
  });

  std::sort(maxima.begin(), maxima.end());
  const double level = 1.0 - alpha.value();
  const double nd = static_cast<double>(reps);
  auto order_stat = [&](double rank) {
    // rank is 1-based
    const auto r = static_cast<std::int64_t>(std::clamp(std::ceil(rank), 1.0, nd));
    return maxima[static_cast<std::size_t>(r - 1)];
  };
  const double spread = std::sqrt(nd * level * (1.0 - level));

  HsdQuantile out;
  out.h = order_stat(level * nd);
  out.alpha = alpha;
  out.reps = reps;
  out.seed = seed;
  out.std_error = 0.5 * (order_stat(level * nd + spread) - order_stat(level * nd - spread));
  out.n = n;
  out.sigma_checksum = covariance_checksum(sigma);
  out.threads = threads;
  return out;
}

bool hsd_verify(const GaussianModel& model, const Selection& sel, Probability alpha,
                const HsdQuantile& h) {
  if (h.n != model.n() || h.sigma_checksum != covariance_checksum(model.sigma())) {
    throw Error(ErrorCode::kCovarianceMismatch,
                "hsd_verify: quantile was computed for a different covariance");
  }
  if (h.alpha != alpha) {
    throw Error(ErrorCode::kInvalidArgument, "hsd_verify: quantile was computed at a different alpha");
  }
  const MinPair mp = min_pair(model, sel, 0.0);
  return model.x()(mp.i) >= model.x()(mp.j) + model.pair_scale(mp.i, mp.j) * h.h;
}

bool hsd_verify(const GaussianModel& model, int k, Probability alpha, const HsdQuantile& h,
                TiePolicy ties) {
  return hsd_verify(model, top_k(model, k, ties), alpha, h);
}

}  // namespace rankverify
