#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "rankverify/model.hpp"

namespace rankverify {

/// Draws N(mean, sigma) through a lower Cholesky factor. Singular PSD
/// covariances are accepted after adding a diagonal jitter of
/// 1e-12 * trace / n; anything that still fails is reported as not PSD.
class MvnSampler {
 public:
  MvnSampler(Vector mean, const Matrix& sigma);

  Index dim() const noexcept { return mean_.size(); }
  const Matrix& factor() const noexcept { return lower_; }

  template <class Rng>
  void draw(Rng& rng, Vector& out, Vector& scratch) const {
    std::normal_distribution<double> normal;
    scratch.resize(dim());
    for (Index i = 0; i < dim(); ++i) scratch(i) = normal(rng);
    out.noalias() = mean_ + lower_.triangularView<Eigen::Lower>() * scratch;
  }

 private:
  Vector mean_;
  Matrix lower_;
};

/// Monte Carlo work is cut into fixed-size blocks, each with its own RNG
/// stream derived from (seed, block index). Results therefore depend on
/// the seed only, not on how many threads ran the blocks.
inline constexpr std::int64_t kMonteCarloBlock = 1024;

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block);

/// Runs fn(block, begin, end) over [0, total) split into kMonteCarloBlock
/// chunks, on up to `threads` workers. Exceptions from workers are
/// rethrown on the calling thread.
void for_each_block(std::int64_t total, int threads,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn);

/// RANK_VERIFY_THREADS if set and positive, else 1.
int default_thread_count();

}  // namespace rankverify
