#include "cointegra/var_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cointegra/errors.hpp"
#include "cointegra/random.hpp"

namespace cointegra {

namespace {

constexpr double kUnitTol = 1e-6;
constexpr std::size_t kMaxLags = 1'000'000;

// z I - L[eta](z) continued analytically for atoms and matrix-exponential
// densities (sampled densities keep the decay half-plane restriction).
CMat continued_h(const SignedMatrixMeasure& m, Complex z) {
  const int n = m.dim();
  CMat out = z * CMat::Identity(n, n);
  for (const auto& a : m.atoms()) out -= std::exp(-z * a.location) * a.weight.cast<Complex>();
  if (const auto* me = std::get_if<MatExpDensity>(&m.density()); me && me->F.rows() > 0) {
    const auto k = me->F.rows();
    out -= me->H.cast<Complex>() *
           (z * CMat::Identity(k, k) - me->F.cast<Complex>()).partialPivLu().solve(me->G.cast<Complex>());
  } else if (std::holds_alternative<SampledDensity>(m.density())) {
    if (!(z.real() > -m.decay_rate())) throw RootError("root search left the domain of the sampled density");
    out = z * CMat::Identity(n, n) - m.laplace(z);
  }
  return out;
}

}  // namespace

void VARSpec::validate() const {
  if (dim < 1 || p < 1) throw InvalidArgument("VAR needs dim >= 1 and p >= 1");
  if (int(gamma.size()) != p) throw InvalidArgument("VAR needs exactly p Gamma matrices");
  for (const auto& g : gamma) {
    if (g.rows() != dim || g.cols() != dim) throw InvalidArgument("Gamma matrix has the wrong shape");
  }
  if (sigma_eps.rows() != dim || sigma_eps.cols() != dim) throw InvalidArgument("Sigma_eps has the wrong shape");
  psd_factor(sigma_eps);
  if (!(condition_number(sigma_eps) < 1e12)) throw InvalidArgument("Sigma_eps must be invertible (condition < 1e12)");
}

Mat VARSpec::companion() const {
  const int n = dim;
  Mat a = Mat::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) a.block(0, j * n, n, n) = gamma[std::size_t(j)];
  for (int i = 1; i < p; ++i) a.block(i * n, (i - 1) * n, n, n) = Mat::Identity(n, n);
  return a;
}

CMat VARSpec::gamma_at(Complex z) const {
  CMat out = CMat::Identity(dim, dim);
  Complex power = 1.0;
  for (const auto& g : gamma) {
    power *= z;
    out -= power * g.cast<Complex>();
  }
  return out;
}

VAREcf var_ecf(const VARSpec& spec) {
  const int n = spec.dim;
  VAREcf out;
  out.pi0 = -Mat::Identity(n, n);
  for (const auto& g : spec.gamma) out.pi0 += g;
  for (int j = 1; j < spec.p; ++j) {
    Mat pj = Mat::Zero(n, n);
    for (int k = j + 1; k <= spec.p; ++k) pj -= spec.gamma[std::size_t(k - 1)];
    out.pis.push_back(std::move(pj));
  }
  return out;
}

VARGrangerRep var_granger(const VARSpec& spec, double tol, double rank_tol) {
  spec.validate();
  const int n = spec.dim;
  const int p = spec.p;
  VARGrangerRep rep;

  Eigen::EigenSolver<Mat> es(spec.companion(), false);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lam = es.eigenvalues()(i);
    const bool unit = std::abs(lam - 1.0) <= kUnitTol;
    if (!unit && std::abs(lam) > 1.0 - 1e-10) {
      throw RootError("det Gamma(z) has a root at z = " + std::to_string((1.0 / lam).real()) + " + " +
                      std::to_string((1.0 / lam).imag()) + "i, inside or on the unit circle away from 1");
    }
    if (!unit) rho = std::max(rho, std::abs(lam));
  }
  rep.spectral_radius = rho;

  const auto ecf = var_ecf(spec);
  rep.pi0 = ecf.pi0;
  rep.pis = ecf.pis;
  const auto rf = rank_factors(rep.pi0, rank_tol);
  rep.rank = rf.rank;
  rep.alpha = rf.alpha;
  rep.beta = rf.beta;
  rep.alpha_perp = rf.alpha_perp;
  rep.beta_perp = rf.beta_perp;
  if (rf.rank == n) {
    rep.c0 = Mat::Zero(n, n);
  } else {
    Mat middle = Mat::Identity(n, n);
    for (const auto& pj : rep.pis) middle -= pj;
    rep.c0 = long_run_matrix(rf.alpha_perp, middle, rf.beta_perp);
  }

  // D_0 = I - C_0, D_m = sum_i Gamma_i D_{m-i} + [m <= p] Gamma_m C_0 - [m = 1] I,
  // C(j) = D_0 + ... + D_j.
  std::vector<Mat> d;
  auto extend = [&](std::size_t upto) {
    while (rep.c.size() <= upto) {
      const std::size_t m = d.size();
      Mat next;
      if (m == 0) {
        next = Mat::Identity(n, n) - rep.c0;
      } else {
        next = Mat::Zero(n, n);
        for (std::size_t i = 1; i <= std::min<std::size_t>(m, std::size_t(p)); ++i) {
          next += spec.gamma[i - 1] * d[m - i];
        }
        if (m <= std::size_t(p)) next += spec.gamma[m - 1] * rep.c0;
        if (m == 1) next -= Mat::Identity(n, n);
      }
      d.push_back(next);
      rep.c.push_back(rep.c.empty() ? next : Mat(rep.c.back() + next));
    }
  };
  extend(49);

  const double r = std::max(rho, 0.1);
  double cmax = 0.0;
  for (const auto& c : rep.c) cmax = std::max(cmax, c.norm());
  double k = 0.0;
  for (std::size_t j = 0; j < rep.c.size(); ++j) {
    const double norm = rep.c[j].norm();
    if (norm > 1e-14 * cmax) k = std::max(k, norm / std::pow(r, double(j)));
  }
  std::size_t J = std::size_t(std::max(p, 1));
  if (k > 0.0) {
    const double need = std::ceil(std::log(tol * (1.0 - r) / k) / std::log(r));
    if (need > double(kMaxLags)) throw RootError("Granger series converges too slowly (spectral radius near 1)");
    J = std::max<std::size_t>(J, std::size_t(std::max(0.0, need)));
  }
  extend(J);
  rep.c.resize(J + 1);
  rep.tail_bound = k * std::pow(r, double(J + 1)) / (1.0 - r);
  return rep;
}

VARSimulation simulate_var(const VARSpec& spec, const VARGrangerRep& rep, const Vec& xi, long T,
                           std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  const int n = spec.dim;
  const int p = spec.p;
  if (xi.size() != n) throw InvalidArgument("xi has the wrong length");
  if (T < 0) throw InvalidArgument("T must be >= 0");
  if ((rep.pi0 * xi).norm() > 1e-8 * (1.0 + xi.norm())) throw XiError("Pi_0 xi != 0");
  const long J = long(rep.c.size()) - 1;
  const long first = 1 - p;
  const long jmin = first - J;
  const Mat root = psd_factor(spec.sigma_eps);
  Mat eps(n, T - jmin + 1);
  Vec z(n);
  double eps_max = 0.0;
  for (long j = jmin; j <= T; ++j) {
    CounterStream rng(seed, stream, j);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    eps.col(j - jmin) = root * z;
    eps_max = std::max(eps_max, eps.col(j - jmin).norm());
  }
  auto e = [&](long j) { return eps.col(j - jmin); };

  // Granger form on t = first..T.
  const long count = T - first + 1;
  Mat granger(n, count);
  Vec cum = Vec::Zero(n);
  for (long t = 0; t > first; --t) cum -= e(t);
  for (long t = first; t <= T; ++t) {
    if (t > first) cum += e(t);
    Vec x = xi + rep.c0 * cum;
    for (long i = 0; i <= J; ++i) x += rep.c[std::size_t(i)] * e(t - i);
    granger.col(t - first) = x;
  }
  Mat recursion = granger;
  for (long t = 1; t <= T; ++t) {
    Vec x = e(t);
    for (int i = 1; i <= p; ++i) x += spec.gamma[std::size_t(i - 1)] * recursion.col(t - i - first);
    recursion.col(t - first) = x;
  }

  VARSimulation out;
  out.granger = granger.rightCols(T + 1);
  out.recursion = recursion.rightCols(T + 1);
  double xmax = 0.0;
  for (long t = 0; t <= T; ++t) {
    out.max_deviation = std::max(out.max_deviation, (out.granger.col(t) - out.recursion.col(t)).norm());
    xmax = std::max(xmax, out.granger.col(t).norm());
  }
  double gsum = 0.0, cbig = 0.0;
  for (const auto& g : spec.gamma) gsum += g.norm();
  for (const auto& c : rep.c) cbig = std::max(cbig, c.norm());
  const double response = rep.c0.norm() + cbig;
  out.bound = rep.tail_bound * eps_max * (1.0 + double(p) * response * gsum) +
              1e-12 * std::sqrt(double(T + 1)) * (1.0 + xmax) * double(n * p);
  return out;
}

VARSpec discretization_bridge(const SignedMatrixMeasure& measure, double dt, int lag_cap, const Mat& sigma) {
  if (!(dt > 0.0)) throw InvalidArgument("discretization step must be positive");
  if (lag_cap < 1) throw InvalidArgument("lag_cap must be >= 1");
  const int n = measure.dim();
  std::vector<Mat> w(std::size_t(lag_cap), Mat::Zero(n, n));
  Mat atom_mass = Mat::Zero(n, n);
  for (const auto& a : measure.atoms()) {
    const double j = std::round(a.location / dt);
    if (j >= double(lag_cap)) {
      throw LagError("atom at " + std::to_string(a.location) + " needs more than " + std::to_string(lag_cap) + " lags");
    }
    w[std::size_t(j)] += a.weight;
    atom_mass += a.weight;
  }
  if (measure.has_density()) {
    Mat prev = Mat::Zero(n, n);
    for (int j = 0; j < lag_cap; ++j) {
      const Mat upto = measure.density_integral((double(j) + 0.5) * dt);
      w[std::size_t(j)] += upto - prev;
      prev = upto;
    }
    const Mat missing = measure.total_mass() - atom_mass - prev;
    if (missing.norm() > 1e-6) {
      throw LagError("lag_cap * dt leaves density mass " + std::to_string(missing.norm()) + " uncovered");
    }
    // The small uncovered tail goes to the last lag so that sum_j W_j equals
    // the total mass and the unit root of the continuous model is kept exactly.
    w.back() += missing;
  }
  VARSpec spec;
  spec.dim = n;
  spec.p = lag_cap;
  for (int j = 0; j < lag_cap; ++j) spec.gamma.push_back(dt * w[std::size_t(j)]);
  spec.gamma[0] += Mat::Identity(n, n);
  spec.sigma_eps = sigma.size() ? Mat(dt * sigma) : Mat(dt * Mat::Identity(n, n));
  return spec;
}

std::vector<RootMatch> match_roots(const VARSpec& spec, const SignedMatrixMeasure& measure, double dt, int count) {
  Eigen::EigenSolver<Mat> es(spec.companion(), false);
  std::vector<Complex> lam;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    // Zero eigenvalues come from vanishing lag matrices and have no logarithm.
    if (std::abs(es.eigenvalues()[i]) > 1e-12) lam.push_back(es.eigenvalues()[i]);
  }
  std::sort(lam.begin(), lam.end(), [](Complex a, Complex b) {
    if (std::abs(std::abs(a) - std::abs(b)) > 1e-12) return std::abs(a) > std::abs(b);
    return a.imag() > b.imag();
  });
  std::vector<RootMatch> out;
  auto det = [&](Complex s) { return continued_h(measure, s).determinant(); };
  for (int i = 0; i < count && i < int(lam.size()); ++i) {
    const Complex start = std::log(lam[std::size_t(i)]) / dt;
    Complex s = start;
    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
      const double step = 1e-6 * (1.0 + std::abs(s));
      const Complex g = det(s);
      const Complex dg = (det(s + step) - det(s - step)) / (2.0 * step);
      if (g == 0.0) converged = true;
      if (dg == 0.0) break;
      const Complex delta = g / dg;
      s -= delta;
      converged = converged || std::abs(delta) <= 1e-13 * (1.0 + std::abs(s));
    }
    if (!converged) {
      // Repeated zero: Newton on g / g' converges quadratically; the attainable
      // accuracy is about sqrt(machine epsilon).
      s = start;
      double last = 0.0;
      for (int it = 0; it < 100 && !converged; ++it) {
        const double step = 1e-4 * (1.0 + std::abs(s));
        const Complex g = det(s);
        if (g == 0.0) {
          converged = true;
          break;
        }
        const Complex gp = det(s + step), gm = det(s - step);
        const Complex d1 = (gp - gm) / (2.0 * step);
        const Complex d2 = (gp - 2.0 * g + gm) / (step * step);
        const Complex denom = d1 * d1 - g * d2;
        if (denom == 0.0) break;
        const Complex delta = g * d1 / denom;
        s -= delta;
        last = std::abs(delta);
        converged = last <= 1e-13 * (1.0 + std::abs(s));
      }
      converged = converged || last <= 1e-7 * (1.0 + std::abs(s));
    }
    if (!converged || !std::isfinite(s.real())) throw RootError("Newton iteration on det h did not converge");
    out.push_back({lam[std::size_t(i)], s, std::abs(lam[std::size_t(i)] - std::exp(dt * s))});
  }
  return out;
}

}  // namespace cointegra
