#include "rankverify/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rankverify/error.hpp"

namespace rankverify {

MvnSampler::MvnSampler(Vector mean, const Matrix& sigma) : mean_(std::move(mean)) {
  const Index n = mean_.size();
  if (sigma.rows() != n || sigma.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "MvnSampler: mean and covariance sizes differ");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * sigma.trace() / static_cast<double>(n);
    Matrix bumped = sigma;
    bumped.diagonal().array() += jitter;
    llt.compute(bumped);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kNotPositiveSemidefinite,
                  "covariance is not positive semi-definite; cannot sample");
    }
  }
  lower_ = llt.matrixL();
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

void for_each_block(std::int64_t total, int threads,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  if (total <= 0) return;
  const std::int64_t blocks = (total + kMonteCarloBlock - 1) / kMonteCarloBlock;
  auto run_block = [&](std::int64_t b) {
    const std::int64_t begin = b * kMonteCarloBlock;
    fn(b, begin, std::min(total, begin + kMonteCarloBlock));
  };
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, blocks));
  if (workers == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t b = next++; b < blocks; b = next++) {
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = blocks;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

int default_thread_count() {
  if (const char* env = std::getenv("RANK_VERIFY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace rankverify
