#include "cointegra/fixtures.hpp"

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/random.hpp"

namespace cointegra::fixtures {

SignedMatrixMeasure ou_stationary() { return SignedMatrixMeasure::dirac(-Mat::Identity(2, 2)); }

Mat ou_cointegrated_matrix() {
  Mat a(2, 2);
  a << -1.0, 1.0, 0.0, 0.0;
  return a;
}

SignedMatrixMeasure ou_cointegrated() { return SignedMatrixMeasure::dirac(ou_cointegrated_matrix()); }

SignedMatrixMeasure zero_measure(int n) { return SignedMatrixMeasure::zero(n); }

SignedMatrixMeasure unit_delay() { return SignedMatrixMeasure::dirac(-Mat::Identity(1, 1), 1.0, 0.2); }

MCARMASpec mcarma_p1() {
  MCARMASpec s;
  s.dim = 2;
  s.p = 1;
  Mat p1(2, 2);
  p1 << 1.0, -1.0, 0.0, 0.0;
  s.P = {p1};
  return s;
}

MCARMASpec mcarma_bivariate() {
  MCARMASpec s;
  s.dim = 2;
  s.p = 2;
  Mat p1(2, 2), p2(2, 2), q1(2, 2);
  p1 << 2.0, 0.3, 0.0, 2.0;
  p2 << 1.0, -1.0, 0.0, 0.0;
  q1 << 1.5, 0.2, 0.0, 1.0;
  s.P = {p1, p2};
  s.Q = {q1};
  return s;
}

MCARMASpec mcarma_random(std::uint64_t seed) {
  const int n = 3;
  for (std::int64_t attempt = 0; attempt < 1000; ++attempt) {
    CounterStream rng(seed, 0x4d43, attempt);
    auto draw = [&](int rows, int cols, double scale) {
      Mat m(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
      return m;
    };
    const int r = 1 + int(rng.uniform() * 2.0);  // 1 or 2
    const Mat a = draw(n, r, 1.0);
    const Mat b = draw(n, r, 1.0);
    MCARMASpec s;
    s.dim = n;
    s.p = 2;
    s.P = {Mat(draw(n, n, 0.4) + 3.0 * Mat::Identity(n, n)), Mat(a * b.transpose())};
    s.Q = {Mat(draw(n, n, 0.3) + 2.0 * Mat::Identity(n, n))};
    // Keep the nonzero zeros of det P (eigenvalues of the companion form)
    // clear of the default scan strip Re z > -0.1.
    Eigen::EigenSolver<Mat> es(state_space(s).A, false);
    bool clear = true;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex z = es.eigenvalues()(i);
      if (std::abs(z) > 1e-8 && z.real() > -0.25) clear = false;
    }
    if (!clear) continue;
    try {
      if (check_cointegrated_conditions(s).all_pass()) return s;
    } catch (const ScanResolutionError&) {
    }
  }
  throw Error("no admissible random MCARMA spec found");
}

VARSpec var_bivariate() {
  VARSpec s;
  s.dim = 2;
  s.p = 1;
  s.gamma = {Mat::Constant(2, 2, 0.5)};
  s.sigma_eps = Mat::Identity(2, 2);
  return s;
}

VARSpec var_random_walk() {
  VARSpec s;
  s.dim = 1;
  s.p = 1;
  s.gamma = {Mat::Identity(1, 1)};
  s.sigma_eps = Mat::Identity(1, 1);
  return s;
}

VARSpec var_ar1() {
  VARSpec s;
  s.dim = 1;
  s.p = 1;
  s.gamma = {Mat::Constant(1, 1, 0.5)};
  s.sigma_eps = Mat::Identity(1, 1);
  return s;
}

LevyModel brownian(int n) {
  LevyModel m;
  m.dim = n;
  m.drift = Vec::Zero(n);
  m.gaussian_cov = Mat::Identity(n, n);
  return m;
}

}  // namespace cointegra::fixtures
