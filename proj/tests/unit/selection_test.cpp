#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "rankverify/error.hpp"
#include "rankverify/selection.hpp"
#include "rankverify/sim.hpp"
#include "test_support.hpp"

using namespace rankverify;
namespace rt = rankverify::testing;

namespace {

GaussianModel model(std::initializer_list<double> x, const Matrix& sigma) {
  Vector v(static_cast<Index>(x.size()));
  Index i = 0;
  for (double d : x) v(i++) = d;
  return validate(v, sigma);
}

}  // namespace

TEST(TopK, Examples) {
  const auto m = model({3, 1, 2}, Matrix::Identity(3, 3));
  const Selection s1 = top_k(m, 1);
  EXPECT_EQ(s1.inside, std::vector<Index>({0}));
  EXPECT_EQ(s1.outside, std::vector<Index>({1, 2}));
  EXPECT_DOUBLE_EQ(s1.boundary_gap, 1.0);

  const Selection s2 = top_k(m, 2);
  EXPECT_EQ(s2.inside, std::vector<Index>({0, 2}));
  EXPECT_DOUBLE_EQ(s2.boundary_gap, 1.0);
  EXPECT_EQ(s2.pair_count(), 2u);
}

TEST(TopK, BoundaryTie) {
  const auto m = model({1, 1, 0}, Matrix::Identity(3, 3));
  try {
    top_k(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundaryTie);
  }
  const Selection s = top_k(m, 1, TiePolicy::kBreakLowIndex);
  EXPECT_EQ(s.inside, std::vector<Index>({0}));
  EXPECT_TRUE(s.tie_broken);
  EXPECT_EQ(s.boundary_gap, 0.0);
  // A tie away from the boundary is harmless.
  EXPECT_NO_THROW(top_k(m, 2));
}

TEST(TopK, KOutOfRange) {
  const auto m = model({3, 1, 2}, Matrix::Identity(3, 3));
  EXPECT_THROW(top_k(m, 0), Error);
  EXPECT_THROW(top_k(m, 3), Error);
}

TEST(TopK, MatchesSortOnRandomData) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    const Index n = rt::random_n(rng, 2, 12);
    const auto m = validate(rt::random_x(n, rng), Matrix::Identity(n, n));
    const int k = rt::random_k(n, rng);
    const Selection s = top_k(m, k);
    EXPECT_EQ(s.inside, rt::brute_top_k(m.x(), k));
    EXPECT_EQ(s.inside.size() + s.outside.size(), static_cast<std::size_t>(n));
    EXPECT_GT(s.boundary_gap, 0.0);
  }
}

TEST(PairStat, Examples) {
  const auto m = model({1, 0}, Matrix::Identity(2, 2));
  const Selection s = top_k(m, 1);
  const PairStat p0 = pair_stat(m, s, 0, 1, 0.0);
  EXPECT_DOUBLE_EQ(p0.v, std::sqrt(2.0));
  EXPECT_NEAR(p0.d_delta, 0.70711, 1e-5);
  EXPECT_DOUBLE_EQ(pair_stat(m, s, 0, 1, 1.0).d_delta, 0.0);
  EXPECT_THROW(pair_stat(m, s, 1, 0, 0.0), Error);
}

TEST(PairStat, LoadingScenarioPairScale) {
  const Scenario sc = scenario_appendix_a();
  Vector x = sc.mu;
  const GaussianModel m = validate(x, sc.sigma);
  const Selection s = top_k(m, 1);
  const PairStat p = pair_stat(m, s, 0, 1, 0.0);
  EXPECT_NEAR(p.v, std::sqrt(6.0), 1e-14);
  EXPECT_NEAR(p.d_delta, 2.0 / std::sqrt(6.0), 1e-14);
}

TEST(CrossCorrelation, Examples) {
  const auto eq = model({3, 2, 1}, cov_equicorrelated(3, 1.0, 0.5));
  EXPECT_EQ(cross_correlation(eq, {0, 1}, {0, 1}), 1.0);
  EXPECT_NEAR(cross_correlation(eq, {0, 1}, {0, 2}), 0.5, 1e-15);
  const auto id = model({3, 2, 1}, Matrix::Identity(3, 3));
  EXPECT_NEAR(cross_correlation(id, {0, 1}, {2, 1}), 0.5, 1e-15);
}

TEST(CrossCorrelation, SymmetricAndBounded) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    const Index n = rt::random_n(rng, 3, 8);
    const auto m = validate(rt::random_x(n, rng), rt::random_psd(n, rng));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k)
          for (Index l = 0; l < n; ++l) {
            if (i == j || k == l) continue;
            const double a = cross_correlation(m, {i, j}, {k, l});
            const double b = cross_correlation(m, {k, l}, {i, j});
            ASSERT_NEAR(a, b, 1e-14);
            ASSERT_LE(std::abs(a), 1.0);
          }
  }
}

TEST(CrossCorrelation, NonNegativeForDiagonalAndEquicorrelated) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> var(0.1, 5.0);
  for (int t = 0; t < 300; ++t) {
    const Index n = rt::random_n(rng, 3, 8);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = var(rng);
    const double rho = std::uniform_real_distribution<double>(-1.0 / (n - 1) + 1e-3, 0.99)(rng);
    for (const Matrix& sigma : {cov_diagonal(d), cov_equicorrelated(n, var(rng), rho)}) {
      const auto m = validate(rt::random_x(n, rng), sigma);
      const Selection s = top_k(m, rt::random_k(n, rng));
      for (Index i : s.inside)
        for (Index j : s.outside)
          for (Index k : s.inside)
            for (Index l : s.outside) ASSERT_GE(cross_correlation(m, {i, j}, {k, l}), -1e-14);
    }
  }
}

TEST(CrossCorrelation, NonNegativeForAr1WithSmallRhoAndK1) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const Index n = rt::random_n(rng, 3, 10);
    const double rho = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    const auto m = validate(rt::random_x(n, rng), cov_ar1(n, 1.3, rho));
    const Selection s = top_k(m, 1);
    const Index i = s.inside[0];
    for (Index j : s.outside)
      for (Index l : s.outside) ASSERT_GE(cross_correlation(m, {i, j}, {i, l}), -1e-14) << rho;
  }
}

TEST(MinPair, Examples) {
  const auto m = model({3, 1, 2}, Matrix::Identity(3, 3));
  const MinPair p = min_pair(m, top_k(m, 1), 0.0);
  EXPECT_EQ(p.i, 0);
  EXPECT_EQ(p.j, 2);
  EXPECT_NEAR(p.d, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(MinPair, LexicographicTieBreak) {
  // Pairs (0,2) and (1,3) have the same standardized gap.
  const auto m = model({5, 4, 3, 2}, Matrix::Identity(4, 4));
  const MinPair p = min_pair(m, top_k(m, 2), 0.0);
  EXPECT_EQ(p.i, 1);
  EXPECT_EQ(p.j, 2);
  const auto m2 = model({4, 4.5, 3, 2.5}, Matrix::Identity(4, 4));
  const MinPair p2 = min_pair(m2, top_k(m2, 2), 0.0);
  EXPECT_EQ(p2.i, 0);
  EXPECT_EQ(p2.j, 2);
}

TEST(MinPair, AgreesWithExhaustiveScan) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const Index n = rt::random_n(rng, 2, 9);
    const Matrix sigma = rt::random_psd(n, rng);
    const auto m = validate(rt::random_x(n, rng), sigma);
    const Selection s = top_k(m, rt::random_k(n, rng));
    const double delta = std::uniform_real_distribution<double>(-1.0, 2.0)(rng);
    double best = rankverify::kInf;
    for (Index i : s.inside)
      for (Index j : s.outside) {
        const double v = std::sqrt(sigma(i, i) - 2 * sigma(i, j) + sigma(j, j));
        best = std::min(best, (m.x()(i) - m.x()(j) - delta) / v);
      }
    EXPECT_NEAR(min_pair(m, s, delta).d, best, 1e-12 * (1 + std::abs(best)));
  }
}

TEST(MinPair, EquicorrelatedPicksBoundaryIndices) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 300; ++t) {
    const Index n = rt::random_n(rng, 3, 10);
    const double rho = std::uniform_real_distribution<double>(-1.0 / (n - 1) + 1e-3, 0.95)(rng);
    const auto m = validate(rt::random_x(n, rng), cov_equicorrelated(n, 2.0, rho));
    const int k = rt::random_k(n, rng);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return m.x()(a) > m.x()(b); });
    const MinPair p = min_pair(m, top_k(m, k), std::uniform_real_distribution<double>(0.0, 2.0)(rng));
    EXPECT_EQ(p.i, order[static_cast<std::size_t>(k - 1)]);
    EXPECT_EQ(p.j, order[static_cast<std::size_t>(k)]);
  }
}
