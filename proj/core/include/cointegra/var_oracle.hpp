#pragma once

#include <cstdint>
#include <vector>

#include "cointegra/measure.hpp"

namespace cointegra {

/// X_t = Gamma_1 X_{t-1} + ... + Gamma_p X_{t-p} + eps_t, eps_t ~ N(0, Sigma_eps).
struct VARSpec {
  int dim = 1;
  int p = 1;
  std::vector<Mat> gamma;
  Mat sigma_eps;

  /// Shapes, PSD noise covariance with condition number below 1e12.
  void validate() const;
  /// Block companion matrix; its eigenvalues are the reciprocal roots of det Gamma(z).
  Mat companion() const;
  /// Gamma(z) = I - sum Gamma_j z^j.
  CMat gamma_at(Complex z) const;
};

struct VAREcf {
  Mat pi0;
  std::vector<Mat> pis;  // Pi_1..Pi_{p-1}
};

/// Pi_0 = -I + sum Gamma_j, Pi_j = -sum_{k>j} Gamma_k.
VAREcf var_ecf(const VARSpec& spec);

struct VARGrangerRep {
  Mat pi0;
  std::vector<Mat> pis;
  int rank = 0;
  Mat alpha;
  Mat beta;
  Mat alpha_perp;
  Mat beta_perp;
  Mat c0;
  std::vector<Mat> c;  // C(0..J)
  double spectral_radius = 0.0;  // largest |reciprocal root| away from 1
  double tail_bound = 0.0;       // bound on sum_{j > J} ||C(j)||
};

/// Long-run matrix and the coefficients of Gamma(z)^{-1} - (1 - z)^{-1} C_0
/// expanded at z = 0, truncated once the certified geometric tail is below
/// tol. Throws RootError for reciprocal roots outside the closed unit disc or
/// on the circle away from 1, and SingularError when the long-run bracket is
/// singular.
VARGrangerRep var_granger(const VARSpec& spec, double tol = 1e-12, double rank_tol = 1e-10);

struct VARSimulation {
  Mat granger;    // n x (T + 1), t = 0..T
  Mat recursion;  // n x (T + 1)
  double max_deviation = 0.0;
  double bound = 0.0;
  bool agree() const { return max_deviation <= bound; }
};

/// Builds X_0..X_T from the Granger form and, independently, by the VAR
/// recursion started from Granger values at t = 1-p..0. eps_j is drawn from
/// CounterStream(seed, stream, j). XiError when ||Pi_0 xi|| > 1e-8 (1 + ||xi||).
VARSimulation simulate_var(const VARSpec& spec, const VARGrangerRep& rep, const Vec& xi, long T,
                           std::uint64_t seed, std::uint64_t stream = 0);

/// Euler discretization X_k = X_{k-1} + dt sum_j W_j X_{k-1-j} + dZ_k as a
/// VAR(lag_cap): atoms go to the nearest lag, the density contributes its mass
/// on [(j - 1/2) dt, (j + 1/2) dt). Noise covariance dt * sigma (identity when
/// empty). LagError when the lags miss an atom or more than 1e-6 of density mass;
/// a smaller uncovered tail is added to the last lag.
VARSpec discretization_bridge(const SignedMatrixMeasure& measure, double dt, int lag_cap, const Mat& sigma = Mat());

struct RootMatch {
  Complex discrete;    // companion eigenvalue
  Complex continuous;  // zero of det h near log(discrete) / dt
  double deviation = 0.0;  // |discrete - exp(dt * continuous)|
};

/// The `count` largest companion eigenvalues paired with zeros of det h by
/// Newton iteration from log(lambda) / dt. RootError when Newton fails.
std::vector<RootMatch> match_roots(const VARSpec& spec, const SignedMatrixMeasure& measure, double dt, int count);

}  // namespace cointegra
