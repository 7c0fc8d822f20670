#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rankverify/model.hpp"

namespace rankverify::testing {

inline Matrix random_psd(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.2, 2.0);
  const Index rank = std::max<Index>(1, n - 1);
  Matrix a(n, rank);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < rank; ++j) a(i, j) = z(rng);
  Matrix sigma = a * a.transpose() / static_cast<double>(rank);
  for (Index i = 0; i < n; ++i) sigma(i, i) += 0.05 + 0.5 * u(rng);
  // Uneven scales across coordinates.
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = u(rng);
  const Matrix scaled = s.asDiagonal() * sigma * s.asDiagonal();
  return (0.5 * (scaled + scaled.transpose())).eval();
}

inline Vector random_x(Index n, std::mt19937_64& rng, double scale = 2.0) {
  std::normal_distribution<double> z(0.0, scale);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = z(rng);
  return x;
}

inline int random_k(Index n, std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(1, static_cast<int>(n) - 1)(rng);
}

inline Index random_n(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double relative_error(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

/// Indices of the k largest entries, sorted; independent of library code.
inline std::vector<Index> brute_top_k(const Vector& x, int k) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return x(a) > x(b); });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace rankverify::testing
