#include "cointegra/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cointegra/errors.hpp"
#include "cointegra/winding.hpp"

namespace cointegra {

CMat CharacteristicFunction::operator()(Complex z) const {
  const int n = measure_.dim();
  return z * CMat::Identity(n, n) - measure_.laplace(z);
}

Complex CharacteristicFunction::det(Complex z) const { return (*this)(z).partialPivLu().determinant(); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stationary:
      return "Stationary";
    case Verdict::Cointegrated:
      return "Cointegrated";
    case Verdict::Rejected:
      return "Rejected";
  }
  return "Rejected";
}

CointegrationStructure cointegration_structure(const CharacteristicFunction& cf, double rank_tol) {
  const auto& m = cf.measure();
  const int n = m.dim();
  CointegrationStructure s;
  s.rank_tol = rank_tol;
  s.pi0 = m.total_mass();
  s.pi_total = -m.first_moment();
  const auto rf = rank_factors(s.pi0, rank_tol);
  s.rank = rf.rank;
  s.alpha = rf.alpha;
  s.beta = rf.beta;
  s.alpha_perp = rf.alpha_perp;
  s.beta_perp = rf.beta_perp;
  if (s.rank == n) {
    s.c0 = Mat::Zero(n, n);
  } else {
    s.c0 = long_run_matrix(s.alpha_perp, Mat::Identity(n, n) - s.pi_total, s.beta_perp);
  }
  return s;
}

namespace {

CMat z_times_inverse(const CharacteristicFunction& cf, Complex z) {
  const int n = cf.dim();
  return cf(z).partialPivLu().solve(z * CMat::Identity(n, n));
}

}  // namespace

ConditionReport check_conditions(const CharacteristicFunction& cf, const ScanOptions& scan, double rank_tol) {
  const auto& m = cf.measure();
  const int n = m.dim();
  ConditionReport rep;
  rep.epsilon = scan.epsilon > 0.0 ? scan.epsilon : std::min(0.1, 0.5 * m.decay_rate());
  if (!(rep.epsilon < m.decay_rate())) throw DomainError("scan epsilon must lie in (0, decay_rate)");

  // Outside the rectangle |z| >= R, and ||L[eta](z)|| <= M there, so h(z) =
  // z (I - L/z) is invertible as soon as R > 2M.
  const double bound = m.exponential_moment(rep.epsilon);
  double radius = std::max(scan.radius, 2.0 * rep.epsilon + 1.0);
  while (!(radius > 2.0 * bound)) radius *= 2.0;
  rep.radius = radius;

  WindingOptions wopts;
  wopts.max_depth = scan.refinement;
  const ScalarFunction det = [&cf](Complex z) { return cf.det(z); };
  const auto count = count_zeros_indented(det, rep.epsilon, radius, scan.indentation, wopts);
  rep.zero_count_right_halfplane = count.outside_origin;
  rep.origin_multiplicity = count.at_origin;

  // Route A: determinant at the origin and the analytic pole-order probe.
  const CMat h0 = cf(0.0);
  Eigen::JacobiSVD<CMat> svd0(h0);
  const double smax0 = svd0.singularValues()(0);
  const double det0 = std::abs(h0.partialPivLu().determinant());
  rep.zero_at_origin = det0 <= rank_tol * std::pow(std::max(1.0, smax0), n);

  std::vector<CMat> probe;
  for (int k = 2; k <= 6; ++k) probe.push_back(z_times_inverse(cf, std::pow(10.0, -k)));
  const double last_norm = probe.back().norm();
  const double last_step = (probe[4] - probe[3]).norm();
  const bool finite = std::isfinite(last_norm) && last_step <= 1e-3 * (1.0 + last_norm) &&
                      (probe[4] - probe[3]).norm() <= (probe[3] - probe[2]).norm() + 1e-12;
  rep.pole_simple = finite && last_norm > 1e-6;
  rep.route_a_pass = rep.zero_count_right_halfplane == 0 && (!rep.zero_at_origin || rep.pole_simple);

  // Route B: algebraic criterion on Pi_0 and Pi([0, inf)).
  const auto rf = rank_factors(m.total_mass(), rank_tol);
  rep.rank = rf.rank;
  bool invertible = true;
  if (rf.rank < n) {
    const Mat middle = Mat::Identity(n, n) + m.first_moment();
    rep.bracket_condition = condition_number(rf.alpha_perp.transpose() * middle * rf.beta_perp);
    invertible = rep.bracket_condition <= 1e12;
  } else {
    rep.bracket_condition = 1.0;
  }
  rep.route_b_pass = rep.zero_count_right_halfplane == 0 && invertible;

  if (rep.zero_count_right_halfplane == 0 && !rep.zero_at_origin) {
    rep.verdict = Verdict::Stationary;
  } else if (rep.zero_count_right_halfplane == 0 && rep.zero_at_origin && rep.route_a_pass &&
             rep.route_b_pass) {
    rep.verdict = Verdict::Cointegrated;
  } else {
    rep.verdict = Verdict::Rejected;
  }
  return rep;
}

Mat c0_residue_numeric(const CharacteristicFunction& cf) {
  constexpr int kFirst = 4;
  constexpr int kLast = 20;
  constexpr int kLevels = 5;
  std::vector<std::vector<Mat>> table;  // table[k][j], Richardson column j
  for (int k = kFirst; k <= kLast; ++k) {
    const double z = std::ldexp(1.0, -k);
    std::vector<Mat> row{z_times_inverse(cf, z).real()};
    for (int j = 1; j < kLevels && !table.empty() && j <= int(table.back().size()); ++j) {
      const double w = std::ldexp(1.0, j);
      row.push_back((w * row[j - 1] - table.back()[j - 1]) / (w - 1.0));
    }
    table.push_back(std::move(row));
  }
  // Pick the entry whose successive difference in its column is smallest.
  double best_diff = std::numeric_limits<double>::infinity();
  Mat best;
  for (std::size_t k = 1; k < table.size(); ++k) {
    for (std::size_t j = 0; j < table[k].size() && j < table[k - 1].size(); ++j) {
      const double d = (table[k][j] - table[k - 1][j]).norm();
      if (d < best_diff) {
        best_diff = d;
        best = table[k][j];
      }
    }
  }
  if (!(best_diff <= 1e-6 * (1.0 + best.norm()))) {
    throw DivergenceError("z h(z)^{-1} does not converge as z -> 0 (higher-order pole?)");
  }
  return best;
}

}  // namespace cointegra
