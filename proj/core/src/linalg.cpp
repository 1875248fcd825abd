#include "cointegra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cointegra/errors.hpp"

namespace cointegra {

RankFactors rank_factors(const Mat& m, double rank_tol) {
  const Eigen::Index n = m.rows();
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RankFactors out;
  out.singular_values = svd.singularValues();
  const double smax = n > 0 ? out.singular_values(0) : 0.0;
  int r = 0;
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
      if (out.singular_values(i) > rank_tol * smax) ++r;
    }
  }
  out.rank = r;
  const Mat& u = svd.matrixU();
  const Mat& v = svd.matrixV();
  out.alpha = u.leftCols(r) * out.singular_values.head(r).asDiagonal();
  out.beta = v.leftCols(r);
  out.alpha_perp = u.rightCols(n - r);
  out.beta_perp = v.rightCols(n - r);
  return out;
}

double condition_number(const Mat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Mat long_run_matrix(const Mat& alpha_perp, const Mat& middle, const Mat& beta_perp,
                    double max_condition) {
  const Mat bracket = alpha_perp.transpose() * middle * beta_perp;
  const double cond = condition_number(bracket);
  if (!(cond <= max_condition)) {
    throw SingularError("long-run bracket alpha_perp^T M beta_perp is numerically singular (cond = " +
                        std::to_string(cond) + ")");
  }
  return beta_perp * bracket.partialPivLu().solve(alpha_perp.transpose());
}

Mat column_space(const Mat& m, double rank_tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > rank_tol * s(0)) ++r;
    }
  }
  return svd.matrixU().leftCols(r);
}

double max_principal_angle(const Mat& a, const Mat& b) {
  const Mat qa = column_space(a);
  const Mat qb = column_space(b);
  if (qa.cols() != qb.cols()) return M_PI / 2.0;
  if (qa.cols() == 0) return 0.0;
  // Sine of the largest angle; accurate for nearly aligned subspaces where
  // acos of the cosines would lose half the digits.
  const Mat residual = qb - qa * (qa.transpose() * qb);
  return std::asin(std::min(1.0, spectral_norm(residual)));
}

Mat psd_factor(const Mat& sigma, double tol) {
  if (sigma.size() == 0) return sigma;
  if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
    throw CholeskyError("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol * scale) {
    throw CholeskyError("covariance matrix is not positive semidefinite (min eigenvalue " +
                        std::to_string(ev.minCoeff()) + ")");
  }
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace cointegra
