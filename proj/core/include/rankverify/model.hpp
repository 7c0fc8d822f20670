#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rankverify {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Observations X together with a known covariance Sigma.
///
/// The only structural requirement on Sigma is that every pair of
/// coordinates has a strictly positive difference variance
/// v_ij^2 = S_ii - 2 S_ij + S_jj. Positive semi-definiteness is *not*
/// required here (the multinomial approximation is singular); it is
/// recorded so that callers that sample can check it.
///
/// The covariance and its derived pair scales are shared between copies,
/// so `with_observations` is cheap and models are safe to share across
/// threads.
class GaussianModel {
 public:
  const Vector& x() const noexcept { return x_; }
  const Matrix& sigma() const noexcept { return shared_->sigma; }
  Index n() const noexcept { return x_.size(); }

  /// v_ij = sqrt(Var(X_i - X_j)); zero on the diagonal.
  double pair_scale(Index i, Index j) const { return shared_->scale(i, j); }
  double max_pair_scale() const noexcept { return shared_->max_scale; }

  bool positive_semidefinite() const noexcept { return shared_->psd; }
  /// True when the input was asymmetric within tolerance and got averaged.
  bool symmetrized() const noexcept { return shared_->symmetrized; }

  /// Same covariance, new observation vector (size must match).
  GaussianModel with_observations(Vector x) const;

 private:
  struct Shared {
    Matrix sigma;
    Matrix scale;
    double max_scale = 0.0;
    bool psd = true;
    bool symmetrized = false;
  };

  GaussianModel(Vector x, std::shared_ptr<const Shared> shared)
      : x_(std::move(x)), shared_(std::move(shared)) {}

  friend GaussianModel validate(Vector x, Matrix sigma);

  Vector x_;
  std::shared_ptr<const Shared> shared_;
};

/// Builds a model, reporting every violated invariant at once through
/// Error::details(). Asymmetry within 1e-10 * max|Sigma| is averaged away.
GaussianModel validate(Vector x, Matrix sigma);

inline constexpr double kSymmetryTolerance = 1e-10;

enum class CovFamily { kDiagonal, kEquicorrelated, kAr1, kMultinomialApprox, kGeneral };

std::string_view to_string(CovFamily family);
std::optional<CovFamily> cov_family_from_string(std::string_view name);

struct CovFamilyTag {
  CovFamily kind = CovFamily::kGeneral;
  /// rho for equicorrelated / AR(1); empty otherwise.
  std::optional<double> parameter;

  friend bool operator==(const CovFamilyTag&, const CovFamilyTag&) = default;
};

Matrix cov_diagonal(const Vector& variances);
/// Requires -1/(n-1) < rho < 1.
Matrix cov_equicorrelated(Index n, double variance, double rho);
/// Sigma_ij = variance * rho^|i-j|, |rho| < 1.
Matrix cov_ar1(Index n, double variance, double rho);

struct MultinomialApprox {
  Vector pi_hat;
  Matrix sigma;
};

/// pi_hat = counts / t and Sigma = diag(pi_hat)/t - pi_hat pi_hat^T / t.
/// Every count must be positive and the counts must sum to t.
MultinomialApprox multinomial_gaussian_approx(const std::vector<std::int64_t>& counts,
                                              std::int64_t t);

/// Unbiased (divisor m-1) covariance of the rows of `samples` (m x n).
Matrix sample_covariance(const Matrix& samples);

/// Most specific family matching within `tol` relative to max|Sigma|.
/// Checked in the order diagonal, equicorrelated, AR(1), multinomial.
CovFamilyTag classify_covariance(const Matrix& sigma, double tol = 1e-9);

bool is_positive_semidefinite(const Matrix& sigma, double rel_tol = 1e-10);

}  // namespace rankverify
