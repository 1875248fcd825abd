#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cointegra {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Rank decomposition of a square matrix M = alpha * beta^T obtained from a
/// full SVD, together with orthonormal bases of the left and right null
/// spaces (M^T alpha_perp = 0, M beta_perp = 0).
struct RankFactors {
  int rank = 0;
  Mat alpha;
  Mat beta;
  Mat alpha_perp;
  Mat beta_perp;
  Vec singular_values;
};

/// Numerical rank r = #{sigma_i > rank_tol * sigma_max}; r = 0 when M = 0.
RankFactors rank_factors(const Mat& m, double rank_tol);

/// 2-norm condition number via singular values (infinity for singular input).
double condition_number(const Mat& m);

/// beta_perp [alpha_perp^T M beta_perp]^{-1} alpha_perp^T, the residue formula
/// for the long-run matrix. Throws SingularError when the bracket has
/// condition number above max_condition.
Mat long_run_matrix(const Mat& alpha_perp, const Mat& middle, const Mat& beta_perp,
                    double max_condition = 1e12);

/// Largest principal angle (radians) between the column spaces of a and b.
double max_principal_angle(const Mat& a, const Mat& b);

/// Orthonormal basis of the column space of m (rank by rank_tol relative).
Mat column_space(const Mat& m, double rank_tol = 1e-10);

/// Symmetric square-root factor L with L L^T = sigma for a PSD matrix.
/// Negative eigenvalues below -tol * max(1, |sigma|) raise CholeskyError.
Mat psd_factor(const Mat& sigma, double tol = 1e-12);

/// Spectral (operator 2-) norm.
double spectral_norm(const Mat& m);
double spectral_norm(const CMat& m);

}  // namespace cointegra
