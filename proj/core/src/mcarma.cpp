#include "cointegra/mcarma.hpp"

#include <algorithm>
#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/winding.hpp"

namespace cointegra {

namespace {

CMat poly_at(const std::vector<Mat>& coeffs, int degree, int n, Complex z) {
  // Horner on I z^degree + c_1 z^{degree-1} + ... + c_degree.
  CMat acc = CMat::Identity(n, n);
  for (int i = 0; i < degree; ++i) acc = acc * z + coeffs[std::size_t(i)].cast<Complex>();
  return acc;
}

double coefficient_bound(const std::vector<Mat>& coeffs) {
  double b = 0.0;
  for (const auto& c : coeffs) b = std::max(b, spectral_norm(c));
  return b;
}

// Zeros of det poly in [-eps, R] x [-R, R]; R from the Cauchy bound.
RectangleCount scan_det(const std::vector<Mat>& coeffs, int degree, int n, double indentation) {
  const double radius = 2.0 * (1.0 + coefficient_bound(coeffs)) + 1.0;
  auto det = [&](Complex z) { return poly_at(coeffs, degree, n, z).determinant(); };
  WindingOptions opts;
  opts.base_segments = std::max(64, 16 * degree * n);
  opts.max_depth = 24;
  if (indentation > 0.0) return count_zeros_indented(det, 1e-9, radius, indentation, opts);
  const std::vector<Complex> rect{{-1e-9, -radius}, {radius, -radius}, {radius, radius}, {-1e-9, radius}};
  return RectangleCount{winding_polygon(det, rect, opts), 0};
}

}  // namespace

void MCARMASpec::validate() const {
  if (dim < 1) throw InvalidArgument("MCARMA dimension must be >= 1");
  if (p < 1) throw InvalidArgument("MCARMA order p must be >= 1");
  if (int(P.size()) != p) throw InvalidArgument("MCARMA needs exactly p P-coefficients");
  if (int(Q.size()) != p - 1) throw InvalidArgument("MCARMA needs exactly p-1 Q-coefficients");
  for (const auto& m : P) {
    if (m.rows() != dim || m.cols() != dim) throw InvalidArgument("P coefficient has the wrong shape");
  }
  for (const auto& m : Q) {
    if (m.rows() != dim || m.cols() != dim) throw InvalidArgument("Q coefficient has the wrong shape");
  }
}

Mat MCARMASpec::p_coeff(int i) const {
  if (i == 0) return Mat::Identity(dim, dim);
  if (i < 0 || i > p) return Mat::Zero(dim, dim);
  return P[std::size_t(i - 1)];
}

Mat MCARMASpec::q_coeff(int i) const {
  if (i == 0) return Mat::Identity(dim, dim);
  if (i < 0 || i > p - 1) return Mat::Zero(dim, dim);
  return Q[std::size_t(i - 1)];
}

CMat MCARMASpec::p_at(Complex z) const { return poly_at(P, p, dim, z); }
CMat MCARMASpec::q_at(Complex z) const { return poly_at(Q, p - 1, dim, z); }

SignedMatrixMeasure msdde_from_mcarma(const MCARMASpec& spec) {
  spec.validate();
  const int n = spec.dim;
  const int q = spec.p - 1;
  if (q > 0) {
    const auto count = scan_det(spec.Q, q, n, 0.0);
    if (count.outside_origin != 0) {
      throw ConditionError("det Q has " + std::to_string(count.outside_origin) + " zero(s) with Re >= 0");
    }
  }
  const Mat eta0 = spec.q_coeff(1) - spec.p_coeff(1);
  std::vector<Atom> atoms{Atom{0.0, eta0}};
  if (q == 0) return SignedMatrixMeasure(n, std::move(atoms));

  // R_k, the coefficient of z^{p-k}, for k = 2..p.
  Mat F = Mat::Zero(n * q, n * q);
  Mat G(n * q, n);
  Mat H = Mat::Zero(n, n * q);
  H.leftCols(n) = Mat::Identity(n, n);
  for (int j = 1; j <= q; ++j) {
    const int k = j + 1;
    G.middleRows((j - 1) * n, n) = spec.q_coeff(k) - spec.q_coeff(k - 1) * eta0 - spec.p_coeff(k);
    F.block((j - 1) * n, 0, n, n) = -spec.q_coeff(j);
    if (j < q) F.block((j - 1) * n, j * n, n, n) = Mat::Identity(n, n);
  }
  SignedMatrixMeasure measure(n, std::move(atoms), MatExpDensity{H, F, G});
  const double err = fourier_identity_error(spec, measure, 32);
  if (!(err <= 1e-8)) {
    throw VerificationError("bridged measure fails the Fourier identity (relative error " + std::to_string(err) + ")");
  }
  return measure;
}

double fourier_identity_error(const MCARMASpec& spec, const SignedMatrixMeasure& measure, int count) {
  const int n = spec.dim;
  const Mat eta0 = spec.q_coeff(1) - spec.p_coeff(1);
  const auto* me = std::get_if<MatExpDensity>(&measure.density());
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double y = std::pow(10.0, -2.0 + 4.0 * double(i) / double(std::max(1, count - 1)));
    const Complex iy(0.0, y);
    CMat ft = CMat::Zero(n, n);
    if (me && me->F.rows() > 0) {
      const auto m = me->F.rows();
      ft = me->H.cast<Complex>() *
           (iy * CMat::Identity(m, m) - me->F.cast<Complex>()).partialPivLu().solve(me->G.cast<Complex>());
    }
    const CMat qp = spec.q_at(iy).partialPivLu().solve(spec.p_at(iy));
    const CMat target = iy * CMat::Identity(n, n) - eta0.cast<Complex>() - qp;
    worst = std::max(worst, spectral_norm(CMat(ft - target)) / std::max(1.0, spectral_norm(qp)));
  }
  return worst;
}

MCARMAConditionReport check_cointegrated_conditions(const MCARMASpec& spec, double rank_tol) {
  spec.validate();
  const int n = spec.dim;
  MCARMAConditionReport rep;
  const auto pz = scan_det(spec.P, spec.p, n, 1e-4);
  rep.zeros_p_right = pz.outside_origin;
  rep.zeros_p_origin = pz.at_origin;
  rep.zeros_p = pz.outside_origin == 0;
  if (spec.p > 1) {
    const auto qz = scan_det(spec.Q, spec.p - 1, n, 0.0);
    rep.zeros_q_right = qz.outside_origin;
  }
  rep.zeros_q = rep.zeros_q_right == 0;
  rep.stationary = rep.zeros_p && rep.zeros_p_origin == 0 && rep.zeros_q;

  const auto rf = rank_factors(spec.p_coeff(spec.p), rank_tol);
  rep.rank = rf.rank;
  rep.rank_in_range = rf.rank > 0 && rf.rank < n;
  if (n == 1) rep.notes.push_back("n = 1: the rank of P_p cannot lie strictly between 0 and n");
  if (rep.rank_in_range) {
    const Mat bracket = rf.alpha_perp.transpose() * spec.p_coeff(spec.p - 1) * rf.beta_perp;
    rep.bracket_condition = condition_number(bracket);
    rep.bracket_invertible = rep.bracket_condition <= 1e12;
  } else {
    rep.notes.push_back("bracket not evaluated: rank of P_p is " + std::to_string(rf.rank));
  }
  return rep;
}

Mat carma_c0(const MCARMASpec& spec, double rank_tol) {
  spec.validate();
  const int n = spec.dim;
  const auto rf = rank_factors(spec.p_coeff(spec.p), rank_tol);
  if (!(rf.rank > 0 && rf.rank < n)) {
    throw PreconditionError("long-run matrix formula needs 0 < rank P_p < n; got rank " + std::to_string(rf.rank));
  }
  return long_run_matrix(rf.alpha_perp, spec.p_coeff(spec.p - 1), rf.beta_perp) * spec.q_coeff(spec.p - 1);
}

StateSpaceRealization state_space(const MCARMASpec& spec) {
  spec.validate();
  const int n = spec.dim;
  const int p = spec.p;
  StateSpaceRealization ss;
  ss.A = Mat::Zero(n * p, n * p);
  for (int i = 0; i + 1 < p; ++i) ss.A.block(i * n, (i + 1) * n, n, n) = Mat::Identity(n, n);
  for (int j = 0; j < p; ++j) ss.A.block((p - 1) * n, j * n, n, n) = -spec.p_coeff(p - j);
  std::vector<Mat> b{Mat::Identity(n, n)};
  for (int m = 1; m < p; ++m) {
    Mat next = spec.q_coeff(m);
    for (int i = 1; i <= m; ++i) next -= spec.p_coeff(i) * b[std::size_t(m - i)];
    b.push_back(std::move(next));
  }
  ss.B.resize(n * p, n);
  for (int i = 0; i < p; ++i) ss.B.middleRows(i * n, n) = b[std::size_t(i)];
  ss.C = Mat::Zero(n * p, n);
  ss.C.topRows(n) = Mat::Identity(n, n);
  return ss;
}

CMat transfer_fn(const MCARMASpec& spec, Complex z) {
  spec.validate();
  const CMat pz = spec.p_at(z);
  Eigen::JacobiSVD<CMat> svd(pz);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-14 * std::max(1.0, s(0))) {
    throw SingularError("det P(z) vanishes numerically at the requested z");
  }
  return pz.partialPivLu().solve(spec.q_at(z));
}

}  // namespace cointegra
