#include "cointegra/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "cointegra/errors.hpp"

namespace cointegra {

namespace {

constexpr std::size_t kMaxQuadratureSteps = 2'000'000;

double max_real_eigenvalue(const Mat& f) {
  Eigen::EigenSolver<Mat> es(f, false);
  return es.eigenvalues().real().maxCoeff();
}

// Calls visit(t, H e^{Ft} G) on t = 0, h, 2h, ... while t <= t_max.
template <class Visit>
void walk_matexp(const MatExpDensity& d, double h, double t_max, Visit&& visit) {
  const Mat step = (d.F * h).exp();
  Mat state = d.G;
  const auto count = std::min<std::size_t>(kMaxQuadratureSteps, std::size_t(t_max / h) + 1);
  for (std::size_t j = 0; j <= count; ++j) {
    if (!visit(double(j) * h, Mat(d.H * state))) return;
    state = step * state;
  }
}

double matexp_grid_step(const MatExpDensity& d) {
  return 0.02 / std::max(1.0, spectral_norm(d.F));
}

// Integral over [0,t] of e^{Fu} by the Van Loan block exponential
// exp([[F, I], [0, 0]] t) = [[e^{Ft}, int_0^t e^{Fu} du], [0, I]].
Mat integrated_exponential(const Mat& f, double t) {
  const Eigen::Index m = f.rows();
  Mat block = Mat::Zero(2 * m, 2 * m);
  block.topLeftCorner(m, m) = f * t;
  block.topRightCorner(m, m) = Mat::Identity(m, m) * t;
  return block.exp().topRightCorner(m, m);
}

// Linear interpolant of the sampled density at t (zero beyond the grid).
Mat sampled_at(const SampledDensity& d, double t, int n) {
  if (t < 0.0 || d.values.empty()) return Mat::Zero(n, n);
  const double x = t / d.step;
  const auto last = d.values.size() - 1;
  if (x >= double(last)) {
    return x <= double(last) + 1e-12 ? d.values[last] : Mat::Zero(n, n);
  }
  const auto j = std::size_t(std::floor(x));
  const double w = x - double(j);
  return (1.0 - w) * d.values[j] + w * d.values[j + 1];
}

// Integral of the linear interpolant over [0, t].
Mat sampled_integral(const SampledDensity& d, double t, int n) {
  Mat acc = Mat::Zero(n, n);
  if (t <= 0.0 || d.values.size() < 2) return acc;
  const double h = d.step;
  const auto last = d.values.size() - 1;
  for (std::size_t j = 0; j < last; ++j) {
    const double a = double(j) * h;
    if (a >= t) break;
    const double b = std::min(t, a + h);
    const double len = b - a;
    const Mat vb = (1.0 - len / h) * d.values[j] + (len / h) * d.values[j + 1];
    acc += 0.5 * len * (d.values[j] + vb);
  }
  return acc;
}

// (1 - e^{-w}) / w and (1 - e^{-w}(1 + w)) / w^2 with series near zero.
std::pair<Complex, Complex> cell_weights(Complex w) {
  if (std::abs(w) < 1e-2) {
    Complex e1 = 0.0, e2 = 0.0, term = 1.0;
    for (int k = 0; k < 8; ++k) {
      e1 += term / double(k + 1);
      e2 += term / double(k + 2);
      term *= -w / double(k + 1);
    }
    return {e1, e2};
  }
  const Complex ew = std::exp(-w);
  return {(1.0 - ew) / w, (1.0 - ew * (1.0 + w)) / (w * w)};
}

}  // namespace

// ---------------------------------------------------------------------------

Mat lagrange_interpolate(const std::vector<Mat>& values, double step, std::size_t last, double t) {
  const double x = t / step;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-12 && nearest >= 0.0 && nearest <= double(last)) {
    return values[std::size_t(nearest)];
  }
  if (last == 0) return values[0];
  const std::size_t width = std::min<std::size_t>(4, last + 1);
  const auto j = static_cast<long>(std::floor(x));
  long start = j - 1;
  start = std::clamp(start, 0L, static_cast<long>(last + 1 - width));
  Mat out = Mat::Zero(values[0].rows(), values[0].cols());
  for (std::size_t a = 0; a < width; ++a) {
    double basis = 1.0;
    const double xa = double(start) + double(a);
    for (std::size_t b = 0; b < width; ++b) {
      if (a == b) continue;
      const double xb = double(start) + double(b);
      basis *= (x - xb) / (xa - xb);
    }
    out += basis * values[std::size_t(start) + a];
  }
  return out;
}

SampledMatrixFunction::SampledMatrixFunction(double step, std::vector<Mat> values)
    : step_(step), values_(std::move(values)) {
  if (!(step_ > 0.0)) throw GridError("sampled function step must be positive");
  if (values_.empty()) throw GridError("sampled function needs at least one sample");
}

Mat SampledMatrixFunction::cubic_at(double t) const {
  if (t < 0.0) return Mat::Zero(values_[0].rows(), values_[0].cols());
  if (t > horizon() * (1.0 + 1e-12) + 1e-15) {
    throw GridError("evaluation at t = " + std::to_string(t) + " beyond sampled horizon");
  }
  return lagrange_interpolate(values_, step_, values_.size() - 1, t);
}

Mat SampledMatrixFunction::linear_at(double t) const {
  if (t < 0.0) return Mat::Zero(values_[0].rows(), values_[0].cols());
  const double x = t / step_;
  const auto last = values_.size() - 1;
  if (x > double(last) * (1.0 + 1e-12) + 1e-12) {
    throw GridError("evaluation at t = " + std::to_string(t) + " beyond sampled horizon");
  }
  const auto j = std::min<std::size_t>(std::size_t(std::floor(x)), last);
  if (j == last) return values_[last];
  const double w = x - double(j);
  return (1.0 - w) * values_[j] + w * values_[j + 1];
}

// ---------------------------------------------------------------------------

SignedMatrixMeasure::SignedMatrixMeasure(int dim, std::vector<Atom> atoms, Density density,
                                         std::optional<double> decay_rate)
    : dim_(dim), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (dim_ <= 0) throw InvalidArgument("measure dimension must be positive");
  for (const auto& a : atoms_) {
    if (!(a.location >= 0.0) || !std::isfinite(a.location)) {
      throw InvalidArgument("atom locations must be finite and >= 0");
    }
    if (a.weight.rows() != dim_ || a.weight.cols() != dim_) {
      throw InvalidArgument("atom weight must be " + std::to_string(dim_) + "x" + std::to_string(dim_));
    }
  }
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.location < b.location; });

  double derived = 1.0;
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    const auto m = me->F.rows();
    if (me->F.cols() != m || me->H.rows() != dim_ || me->H.cols() != m || me->G.rows() != m ||
        me->G.cols() != dim_) {
      throw InvalidArgument("matrix-exponential density has inconsistent H/F/G shapes");
    }
    const double re_max = m > 0 ? max_real_eigenvalue(me->F) : -2.0;
    if (!(re_max < 0.0)) throw InvalidArgument("matrix-exponential density needs a Hurwitz F");
    derived = -re_max / 2.0;
    if (decay_rate && !(re_max < -*decay_rate)) {
      throw InvalidArgument("decay_rate must be below -max Re eig(F)");
    }
  } else if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    if (!(sd->step > 0.0) || sd->values.empty()) {
      throw InvalidArgument("sampled density needs a positive step and samples");
    }
    for (const auto& v : sd->values) {
      if (v.rows() != dim_ || v.cols() != dim_) throw InvalidArgument("sampled density shape mismatch");
    }
    if (!(sd->tail_lambda > 0.0) || sd->tail_K < 0.0) {
      throw InvalidArgument("sampled density tail bound needs K >= 0 and lambda > 0");
    }
    derived = sd->tail_lambda / 2.0;
    if (decay_rate && !(sd->tail_lambda > *decay_rate)) {
      throw InvalidArgument("sampled density needs tail_lambda > decay_rate");
    }
  }
  decay_rate_ = decay_rate.value_or(derived);
  if (!(decay_rate_ > 0.0) || !std::isfinite(decay_rate_)) {
    throw InvalidArgument("decay_rate must be positive");
  }

  total_mass_ = Mat::Zero(dim_, dim_);
  first_moment_ = Mat::Zero(dim_, dim_);
  for (const auto& a : atoms_) {
    total_mass_ += a.weight;
    first_moment_ += a.location * a.weight;
  }
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() > 0) {
      auto lu = me->F.partialPivLu();
      const Mat finv_g = lu.solve(me->G);
      total_mass_ -= me->H * finv_g;
      first_moment_ += me->H * lu.solve(finv_g);
    }
  } else if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    const double h = sd->step;
    for (std::size_t j = 0; j + 1 < sd->values.size(); ++j) {
      const double a = double(j) * h;
      total_mass_ += 0.5 * h * (sd->values[j] + sd->values[j + 1]);
      first_moment_ += h * (a * 0.5 * (sd->values[j] + sd->values[j + 1]) +
                            h * (sd->values[j] / 6.0 + sd->values[j + 1] / 3.0));
    }
    const double t_end = h * double(sd->values.size() - 1);
    total_mass_error_ = sd->tail_K * std::exp(-sd->tail_lambda * t_end) / sd->tail_lambda;
  }
}

SignedMatrixMeasure SignedMatrixMeasure::zero(int dim, std::optional<double> decay_rate) {
  return SignedMatrixMeasure(dim, {}, {}, decay_rate);
}

SignedMatrixMeasure SignedMatrixMeasure::dirac(const Mat& weight, double location,
                                               std::optional<double> decay_rate) {
  return SignedMatrixMeasure(int(weight.rows()), {Atom{location, weight}}, {}, decay_rate);
}

double SignedMatrixMeasure::max_atom_location() const {
  return atoms_.empty() ? 0.0 : atoms_.back().location;
}

Mat SignedMatrixMeasure::atoms_cdf(double t, bool inclusive) const {
  Mat acc = Mat::Zero(dim_, dim_);
  for (const auto& a : atoms_) {
    if (a.location < t || (inclusive && a.location == t)) acc += a.weight;
  }
  return acc;
}

Mat SignedMatrixMeasure::density_integral(double t) const {
  if (t <= 0.0) return Mat::Zero(dim_, dim_);
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() == 0) return Mat::Zero(dim_, dim_);
    return me->H * integrated_exponential(me->F, t) * me->G;
  }
  if (const auto* sd = std::get_if<SampledDensity>(&density_)) return sampled_integral(*sd, t, dim_);
  return Mat::Zero(dim_, dim_);
}

Mat SignedMatrixMeasure::density_at(double t) const {
  if (t < 0.0) return Mat::Zero(dim_, dim_);
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() == 0) return Mat::Zero(dim_, dim_);
    return me->H * (me->F * t).exp() * me->G;
  }
  if (const auto* sd = std::get_if<SampledDensity>(&density_)) return sampled_at(*sd, t, dim_);
  return Mat::Zero(dim_, dim_);
}

Mat SignedMatrixMeasure::cdf(double t) const {
  if (t < 0.0) return Mat::Zero(dim_, dim_);
  return atoms_cdf(t, true) + density_integral(t);
}

Mat SignedMatrixMeasure::cdf_left(double t) const {
  if (t <= 0.0) return Mat::Zero(dim_, dim_);
  return atoms_cdf(t, false) + density_integral(t);
}

CMat SignedMatrixMeasure::laplace(Complex z) const {
  if (!(z.real() > -decay_rate_)) {
    throw DomainError("Laplace transform requested at Re z = " + std::to_string(z.real()) +
                      " <= -decay_rate");
  }
  CMat acc = CMat::Zero(dim_, dim_);
  for (const auto& a : atoms_) acc += std::exp(-z * a.location) * a.weight.cast<Complex>();
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    const auto m = me->F.rows();
    if (m > 0) {
      const CMat shifted = z * CMat::Identity(m, m) - me->F.cast<Complex>();
      acc += me->H.cast<Complex>() * shifted.partialPivLu().solve(me->G.cast<Complex>());
    }
  } else if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    // Exact transform of the piecewise linear interpolant, cell by cell.
    const double h = sd->step;
    const auto [e1, e2] = cell_weights(z * h);
    for (std::size_t j = 0; j + 1 < sd->values.size(); ++j) {
      const Complex scale = std::exp(-z * (double(j) * h)) * h;
      const Mat& v0 = sd->values[j];
      const Mat& v1 = sd->values[j + 1];
      acc += scale * (e1 * v0.cast<Complex>() + e2 * (v1 - v0).cast<Complex>());
    }
  }
  return acc;
}

Mat SignedMatrixMeasure::convolve(const SampledMatrixFunction& kernel, double t) const {
  const double h = kernel.step();
  const double x = t / h;
  const double m_real = std::round(x);
  if (t < 0.0 || std::abs(x - m_real) > 1e-9 * std::max(1.0, m_real) || m_real > double(kernel.size() - 1)) {
    throw GridError("convolution time t = " + std::to_string(t) + " is not on the kernel grid");
  }
  const auto m = std::size_t(m_real);
  Mat acc = Mat::Zero(kernel[0].rows(), dim_);
  for (const auto& a : atoms_) {
    const double tau = t - a.location;
    if (tau < -1e-12 * std::max(1.0, t)) continue;
    const double y = tau / h;
    const double yr = std::round(y);
    if (std::abs(y - yr) <= 1e-9 * std::max(1.0, yr)) {
      acc += kernel[std::size_t(std::max(0.0, yr))] * a.weight;
    } else {
      acc += kernel.linear_at(tau) * a.weight;
    }
  }
  if (m == 0) return acc;
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() == 0) return acc;
    const Mat step = (me->F * h).exp();
    Mat state = me->G;
    for (std::size_t j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 0.5 * h : h;
      acc += w * kernel[m - j] * (me->H * state);
      state = step * state;
    }
  } else if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    for (std::size_t j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 0.5 * h : h;
      acc += w * kernel[m - j] * sampled_at(*sd, double(j) * h, dim_);
    }
  }
  return acc;
}

double SignedMatrixMeasure::exponential_moment(double rate) const {
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a.weight.norm() * std::exp(rate * a.location);
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() == 0) return acc;
    const double alpha = -max_real_eigenvalue(me->F);
    if (!(rate < alpha)) throw DomainError("exponential moment rate exceeds the density decay");
    const double h = matexp_grid_step(*me);
    const double t_max = 50.0 / (alpha - rate);
    double integral = 0.0;
    double prev = 0.0;
    walk_matexp(*me, h, t_max, [&](double t, const Mat& v) {
      const double g = std::exp(rate * t) * v.norm();
      integral += t == 0.0 ? 0.0 : 0.5 * h * (prev + g);
      prev = g;
      return true;
    });
    acc += 1.05 * integral;
  } else if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    if (!(rate < sd->tail_lambda)) throw DomainError("exponential moment rate exceeds the tail bound");
    const double h = sd->step;
    for (std::size_t j = 0; j + 1 < sd->values.size(); ++j) {
      const double a = double(j) * h;
      acc += 0.5 * h * (std::exp(rate * a) * sd->values[j].norm() +
                        std::exp(rate * (a + h)) * sd->values[j + 1].norm());
    }
    const double t_end = h * double(sd->values.size() - 1);
    acc += sd->tail_K * std::exp(-(sd->tail_lambda - rate) * t_end) / (sd->tail_lambda - rate);
  }
  return acc;
}

double SignedMatrixMeasure::density_support(double tol) const {
  if (const auto* me = std::get_if<MatExpDensity>(&density_)) {
    if (me->F.rows() == 0) return 0.0;
    const double alpha = -max_real_eigenvalue(me->F);
    const double h = matexp_grid_step(*me);
    std::vector<double> cumulative{0.0};
    double prev = 0.0;
    walk_matexp(*me, h, 60.0 / alpha, [&](double t, const Mat& v) {
      const double g = v.norm();
      if (t > 0.0) cumulative.push_back(cumulative.back() + 0.5 * h * (prev + g));
      prev = g;
      return true;
    });
    const double total = cumulative.back();
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
      if (total - cumulative[j] <= tol) return double(j) * h;
    }
    return double(cumulative.size() - 1) * h;
  }
  if (const auto* sd = std::get_if<SampledDensity>(&density_)) {
    const double h = sd->step;
    const double tail = total_mass_error_;
    double remaining = tail;
    for (std::size_t j = sd->values.size() - 1; j > 0; --j) {
      const double cell = 0.5 * h * (sd->values[j].norm() + sd->values[j - 1].norm());
      if (remaining + cell > tol) return double(j) * h;
      remaining += cell;
    }
    return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

PiFunction::PiFunction(SignedMatrixMeasure measure)
    : measure_(std::move(measure)),
      // e^{eps t}||pi(t)|| <= e^{(eps - delta) t} int e^{delta s}|eta|(ds) for t >= 0.
      decay_constant_(measure_.exponential_moment(measure_.decay_rate())) {}

Mat PiFunction::operator()(double t) const {
  if (t < 0.0) return Mat::Zero(measure_.dim(), measure_.dim());
  return measure_.cdf(t) - measure_.total_mass();
}

Mat PiFunction::left_limit(double t) const {
  if (t <= 0.0) return Mat::Zero(measure_.dim(), measure_.dim());
  return measure_.cdf_left(t) - measure_.total_mass();
}

}  // namespace cointegra
