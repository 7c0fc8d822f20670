#include "rankverify/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "rankverify/error.hpp"

namespace rankverify {
namespace {

constexpr std::size_t kMaxReportedViolations = 32;

std::string pair_name(Index i, Index j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  return os.str();
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

GaussianModel GaussianModel::with_observations(Vector x) const {
  if (x.size() != n()) {
    throw Error(ErrorCode::kInvalidArgument,
                "with_observations: expected " + std::to_string(n()) + " observations, got " +
                    std::to_string(x.size()));
  }
  return GaussianModel(std::move(x), shared_);
}

GaussianModel validate(Vector x, Matrix sigma) {
  const Index n = x.size();
  if (n < 2) {
    throw Error(ErrorCode::kValidation, "model needs at least 2 observations",
                {"n = " + std::to_string(n)});
  }
  if (sigma.rows() != n || sigma.cols() != n) {
    throw Error(ErrorCode::kValidation, "covariance dimensions do not match observations",
                {"x has " + std::to_string(n) + " entries, covariance is " +
                 std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols())});
  }

  std::vector<std::string> violations;
  auto note = [&](std::string msg) {
    if (violations.size() < kMaxReportedViolations) violations.push_back(std::move(msg));
  };

  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(x(i))) note("x[" + std::to_string(i) + "] is not finite");
  }
  if (!sigma.allFinite()) note("covariance has non-finite entries");
  if (!violations.empty()) {
    throw Error(ErrorCode::kValidation, "model validation failed", std::move(violations));
  }

  const double scale = max_abs(sigma);
  const double sym_tol = kSymmetryTolerance * scale;
  bool symmetrized = false;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double gap = std::abs(sigma(i, j) - sigma(j, i));
      if (gap > sym_tol) {
        note("covariance asymmetric at " + pair_name(i, j) + ": |S_ij - S_ji| = " +
             std::to_string(gap));
      } else if (gap > 0.0) {
        symmetrized = true;
      }
    }
  }
  if (symmetrized && violations.empty()) sigma = (0.5 * (sigma + sigma.transpose())).eval();

  for (Index i = 0; i < n; ++i) {
    if (!(sigma(i, i) > 0.0)) note("diagonal entry " + std::to_string(i) + " is not positive");
  }

  auto shared = std::make_shared<GaussianModel::Shared>();
  shared->scale = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v2 = sigma(i, i) - 2.0 * sigma(i, j) + sigma(j, j);
      const double floor =
          4.0 * std::numeric_limits<double>::epsilon() * (std::abs(sigma(i, i)) + std::abs(sigma(j, j)));
      if (!(v2 > floor)) {
        note("pair " + pair_name(i, j) + " is perfectly correlated: v^2 = " + std::to_string(v2));
        continue;
      }
      const double v = std::sqrt(v2);
      shared->scale(i, j) = v;
      shared->scale(j, i) = v;
      shared->max_scale = std::max(shared->max_scale, v);
    }
  }
  if (!violations.empty()) {
    throw Error(ErrorCode::kValidation, "model validation failed", std::move(violations));
  }

  shared->psd = is_positive_semidefinite(sigma);
  shared->symmetrized = symmetrized;
  shared->sigma = std::move(sigma);
  return GaussianModel(std::move(x), std::move(shared));
}

std::string_view to_string(CovFamily family) {
  switch (family) {
    case CovFamily::kDiagonal: return "diagonal";
    case CovFamily::kEquicorrelated: return "equicorrelated";
    case CovFamily::kAr1: return "ar1";
    case CovFamily::kMultinomialApprox: return "multinomial-approx";
    case CovFamily::kGeneral: return "general";
  }
  return "general";
}

std::optional<CovFamily> cov_family_from_string(std::string_view name) {
  for (auto f : {CovFamily::kDiagonal, CovFamily::kEquicorrelated, CovFamily::kAr1,
                 CovFamily::kMultinomialApprox, CovFamily::kGeneral}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

Matrix cov_diagonal(const Vector& variances) {
  for (Index i = 0; i < variances.size(); ++i) {
    if (!(variances(i) > 0.0) || !std::isfinite(variances(i))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cov_diagonal: variance " + std::to_string(i) + " must be positive");
    }
  }
  return variances.asDiagonal();
}

Matrix cov_equicorrelated(Index n, double variance, double rho) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "cov_equicorrelated: n must be >= 2");
  if (!(variance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cov_equicorrelated: variance must be positive");
  }
  const double lower = -1.0 / static_cast<double>(n - 1);
  if (!(rho > lower && rho < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cov_equicorrelated: rho must lie in (" + std::to_string(lower) + ", 1)");
  }
  Matrix sigma = Matrix::Constant(n, n, rho * variance);
  sigma.diagonal().setConstant(variance);
  return sigma;
}

Matrix cov_ar1(Index n, double variance, double rho) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "cov_ar1: n must be >= 2");
  if (!(variance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cov_ar1: variance must be positive");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::kInvalidArgument, "cov_ar1: |rho| must be < 1");
  Matrix sigma(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      sigma(i, j) = variance * std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return sigma;
}

MultinomialApprox multinomial_gaussian_approx(const std::vector<std::int64_t>& counts,
                                              std::int64_t t) {
  if (counts.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "multinomial: need at least 2 categories");
  }
  if (t <= 0) throw Error(ErrorCode::kInvalidArgument, "multinomial: t must be positive");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "multinomial: count " + std::to_string(i) + " is zero or negative");
    }
    total += counts[i];
  }
  if (total != t) {
    throw Error(ErrorCode::kInvalidArgument, "multinomial: counts sum to " +
                                                 std::to_string(total) + ", expected t = " +
                                                 std::to_string(t));
  }
  const auto n = static_cast<Index>(counts.size());
  const double td = static_cast<double>(t);
  MultinomialApprox out;
  out.pi_hat.resize(n);
  for (Index i = 0; i < n; ++i) out.pi_hat(i) = static_cast<double>(counts[i]) / td;
  out.sigma = Matrix(out.pi_hat.asDiagonal()) / td - out.pi_hat * out.pi_hat.transpose() / td;
  return out;
}

Matrix sample_covariance(const Matrix& samples) {
  const Index m = samples.rows();
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "sample_covariance: need at least 2 rows");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Matrix centered = samples.rowwise() - mean;
  Matrix cov = centered.transpose() * centered / static_cast<double>(m - 1);
  for (Index i = 0; i < cov.rows(); ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample_covariance: column " + std::to_string(i) + " is constant");
    }
  }
  return cov;
}

namespace {

bool off_diagonal_all(const Matrix& s, auto&& pred) {
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) {
      if (i != j && !pred(i, j)) return false;
    }
  }
  return true;
}

bool constant_diagonal(const Matrix& s, double tol) {
  const double d0 = s(0, 0);
  for (Index i = 1; i < s.rows(); ++i) {
    if (std::abs(s(i, i) - d0) > tol) return false;
  }
  return true;
}

std::optional<CovFamilyTag> match_multinomial(const Matrix& s, double tol) {
  const Index n = s.rows();
  if (n < 3) return std::nullopt;
  if (!off_diagonal_all(s, [&](Index i, Index j) { return s(i, j) < -tol; })) return std::nullopt;
  if ((s.rowwise().sum().cwiseAbs().array() > tol * static_cast<double>(n)).any()) {
    return std::nullopt;
  }
  // S_ij = -t a_i a_j and S_ii = a_i - t a_i^2 with a = pi/t; recover t a_i^2
  // from any two other indices and rebuild.
  Vector a(n);
  for (Index i = 0; i < n; ++i) {
    const Index j = (i + 1) % n;
    const Index k = (i + 2) % n;
    const double t_ai2 = -s(i, j) * s(i, k) / s(j, k);
    a(i) = s(i, i) + t_ai2;
  }
  if ((a.array() <= 0.0).any()) return std::nullopt;
  const double t = 1.0 / a.sum();
  const Matrix rebuilt = Matrix(a.asDiagonal()) - t * a * a.transpose();
  if ((rebuilt - s).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return CovFamilyTag{CovFamily::kMultinomialApprox, std::nullopt};
}

}  // namespace

CovFamilyTag classify_covariance(const Matrix& sigma, double tol) {
  const Index n = sigma.rows();
  if (n < 2 || sigma.cols() != n) return {};
  const double abs_tol = tol * max_abs(sigma);

  if (off_diagonal_all(sigma, [&](Index i, Index j) { return std::abs(sigma(i, j)) <= abs_tol; })) {
    return {CovFamily::kDiagonal, std::nullopt};
  }

  const double var = sigma(0, 0);
  if (constant_diagonal(sigma, abs_tol)) {
    const double off = sigma(0, 1);
    if (off_diagonal_all(sigma, [&](Index i, Index j) { return std::abs(sigma(i, j) - off) <= abs_tol; })) {
      return {CovFamily::kEquicorrelated, off / var};
    }
    const double rho = sigma(0, 1) / var;
    if (std::abs(rho) < 1.0) {
      const bool ar1 = off_diagonal_all(sigma, [&](Index i, Index j) {
        return std::abs(sigma(i, j) - var * std::pow(rho, static_cast<double>(std::abs(i - j)))) <= abs_tol;
      });
      if (ar1) return {CovFamily::kAr1, rho};
    }
  }

  if (auto tag = match_multinomial(sigma, abs_tol)) return *tag;
  return {};
}

bool is_positive_semidefinite(const Matrix& sigma, double rel_tol) {
  if (sigma.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return false;
  const double largest = solver.eigenvalues().cwiseAbs().maxCoeff();
  return solver.eigenvalues().minCoeff() >= -rel_tol * std::max(largest, max_abs(sigma));
}

}  // namespace rankverify
