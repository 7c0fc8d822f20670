#include <random>

#include <benchmark/benchmark.h>

#include "rankverify/baselines.hpp"
#include "rankverify/clb.hpp"
#include "rankverify/model.hpp"
#include "rankverify/verifier.hpp"

using namespace rankverify;

namespace {

GaussianModel random_model(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = z(rng);
  Matrix sigma = a * a.transpose() / static_cast<double>(n) + Matrix::Identity(n, n);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = 3.0 * z(rng);
  return validate(x, sigma);
}

void BM_VerifyFull(benchmark::State& state) {
  const Index n = state.range(0);
  const int k = static_cast<int>(state.range(1));
  const GaussianModel model = random_model(n, 7);
  const RankVerifier v(model, k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(v.verify(0.0, Probability(0.1), Method::kFull));
  }
  state.SetComplexityN(static_cast<std::int64_t>(k * (n - k)));
}

void BM_VerifyFast(benchmark::State& state) {
  const Index n = state.range(0);
  const int k = static_cast<int>(state.range(1));
  const GaussianModel model = random_model(n, 7);
  const RankVerifier v(model, k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(v.fast_check(0.0, Probability(0.1)));
  }
}

void BM_RejectsEarlyExit(benchmark::State& state) {
  const Index n = state.range(0);
  const GaussianModel model = random_model(n, 11);
  const RankVerifier v(model, static_cast<int>(n / 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(v.rejects(0.0, Probability(0.1)));
  }
}

void BM_ClbExact(benchmark::State& state) {
  const Index n = state.range(0);
  const GaussianModel model = random_model(n, 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clb_exact(model, 1, Probability(0.1)));
  }
}

void BM_HsdQuantile(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix sigma = Matrix::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd_quantile(sigma, Probability(0.1), 10000, 1));
  }
}

}  // namespace

BENCHMARK(BM_VerifyFull)->Args({5, 1})->Args({10, 5})->Args({20, 10})->Args({40, 20})->Args({80, 40});
BENCHMARK(BM_VerifyFast)->Args({5, 1})->Args({10, 5})->Args({20, 10})->Args({40, 20})->Args({80, 40});
BENCHMARK(BM_RejectsEarlyExit)->Arg(10)->Arg(40)->Arg(80);
BENCHMARK(BM_ClbExact)->Arg(4)->Arg(10)->Arg(20);
BENCHMARK(BM_HsdQuantile)->Arg(5)->Arg(50);

BENCHMARK_MAIN();
