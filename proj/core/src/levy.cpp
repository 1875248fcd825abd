#include "cointegra/levy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <exception>
#include <mutex>
#include <thread>

#include "cointegra/errors.hpp"
#include "cointegra/random.hpp"

namespace cointegra {

namespace {

long steps_for(double t, double step, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(what) + " must be >= 0");
  return long(std::llround(std::ceil(t / step - 1e-9)));
}

void check_shape(const Mat& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw InvalidArgument(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void LevyModel::validate() const {
  if (dim < 1) throw InvalidArgument("Levy model dimension must be >= 1");
  if (drift.size() != dim) throw InvalidArgument("drift length must equal the dimension");
  check_shape(gaussian_cov, dim, "gaussian_cov");
  psd_factor(gaussian_cov);
  if (!jumps) return;
  if (!(jumps->rate >= 0.0) || !std::isfinite(jumps->rate)) throw InvalidArgument("jump rate must be >= 0");
  if (jumps->kind == JumpSpec::Kind::Gaussian) {
    if (jumps->mean.size() != dim) throw InvalidArgument("jump mean length must equal the dimension");
    check_shape(jumps->cov, dim, "jump cov");
    psd_factor(jumps->cov);
  } else {
    if (jumps->values.empty() || jumps->values.size() != jumps->probabilities.size()) {
      throw InvalidArgument("discrete jumps need matching value and probability lists");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < jumps->values.size(); ++i) {
      if (jumps->values[i].size() != dim) throw InvalidArgument("jump value length must equal the dimension");
      if (!(jumps->probabilities[i] >= 0.0)) throw InvalidArgument("jump probabilities must be >= 0");
      total += jumps->probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("jump probabilities must sum to 1");
  }
}

Mat LevyModel::second_moment() const {
  Mat sigma = gaussian_cov;
  if (!jumps || jumps->rate == 0.0) return sigma;
  Mat ejj = Mat::Zero(dim, dim);
  if (jumps->kind == JumpSpec::Kind::Gaussian) {
    ejj = jumps->cov + jumps->mean * jumps->mean.transpose();
  } else {
    for (std::size_t i = 0; i < jumps->values.size(); ++i) {
      ejj += jumps->probabilities[i] * jumps->values[i] * jumps->values[i].transpose();
    }
  }
  return sigma + jumps->rate * ejj;
}

// ---------------------------------------------------------------------------

IncrementGrid::IncrementGrid(double step, long burn_steps, long max_steps, std::uint64_t seed,
                             std::vector<Vec> increments)
    : step_(step), burn_(burn_steps), max_(max_steps), seed_(seed), increments_(std::move(increments)) {
  if (!(step > 0.0)) throw InvalidArgument("increment step must be positive");
  if (burn_steps < 0 || max_steps < 0 || increments_.size() != std::size_t(burn_steps + max_steps)) {
    throw InvalidArgument("increment count does not match the window");
  }
}

Vec IncrementGrid::z_at(long m) const {
  if (m < -burn_ || m > max_) throw WindowError("Z requested outside the increment window");
  Vec z = Vec::Zero(dim());
  if (m >= 0) {
    for (long k = 1; k <= m; ++k) z += increment(k);
  } else {
    for (long k = m + 1; k <= 0; ++k) z -= increment(k);
  }
  return z;
}

std::vector<Vec> IncrementGrid::cumulative() const {
  std::vector<Vec> out(std::size_t(burn_ + max_ + 1), Vec::Zero(dim()));
  const auto zero = std::size_t(burn_);
  for (long k = 1; k <= max_; ++k) out[zero + std::size_t(k)] = out[zero + std::size_t(k - 1)] + increment(k);
  for (long k = 0; k > -burn_; --k) {
    const auto i = std::size_t(k + burn_);
    out[i - 1] = out[i] - increment(k);
  }
  return out;
}

IncrementGrid IncrementGrid::coarsen(int factor) const {
  if (factor < 1 || burn_ % factor != 0 || max_ % factor != 0) {
    throw InvalidArgument("window ends must be multiples of the coarsening factor");
  }
  std::vector<Vec> out;
  out.reserve(increments_.size() / std::size_t(factor));
  for (std::size_t i = 0; i < increments_.size(); i += std::size_t(factor)) {
    Vec acc = increments_[i];
    for (int j = 1; j < factor; ++j) acc += increments_[i + std::size_t(j)];
    out.push_back(std::move(acc));
  }
  return IncrementGrid(step_ * factor, burn_ / factor, max_ / factor, seed_, std::move(out));
}

IncrementGrid IncrementGrid::combine(double a, const IncrementGrid& other, double b) const {
  if (other.burn_ != burn_ || other.max_ != max_ || other.step_ != step_) {
    throw InvalidArgument("increment grids must share the window");
  }
  std::vector<Vec> out(increments_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * increments_[i] + b * other.increments_[i];
  return IncrementGrid(step_, burn_, max_, seed_, std::move(out));
}

IncrementGrid sample_levy(const LevyModel& model, double step, double t_burn, double t_max, std::uint64_t seed,
                          std::uint64_t stream) {
  model.validate();
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("increment step must be positive");
  const long burn = steps_for(t_burn, step, "burn-in");
  const long max = steps_for(t_max, step, "horizon");
  const int n = model.dim;
  const Mat root = psd_factor(model.gaussian_cov);
  Mat jump_root;
  std::vector<double> cumulative_prob;
  if (model.jumps && model.jumps->kind == JumpSpec::Kind::Gaussian) jump_root = psd_factor(model.jumps->cov);
  if (model.jumps && model.jumps->kind == JumpSpec::Kind::Discrete) {
    double acc = 0.0;
    for (double p : model.jumps->probabilities) cumulative_prob.push_back(acc += p);
  }
  const double sqrt_step = std::sqrt(step);
  const double jump_mean = model.jumps ? model.jumps->rate * step : 0.0;

  std::vector<Vec> incr;
  incr.reserve(std::size_t(burn + max));
  Vec normals(n);
  for (long k = 1 - burn; k <= max; ++k) {
    CounterStream rng(seed, stream, k);
    for (int i = 0; i < n; ++i) normals(i) = rng.normal();
    Vec dz = model.drift * step + sqrt_step * (root * normals);
    if (jump_mean > 0.0) {
      const int count = rng.poisson(jump_mean);
      for (int j = 0; j < count; ++j) {
        if (model.jumps->kind == JumpSpec::Kind::Gaussian) {
          for (int i = 0; i < n; ++i) normals(i) = rng.normal();
          dz += model.jumps->mean + jump_root * normals;
        } else {
          const double u = rng.uniform();
          auto it = std::lower_bound(cumulative_prob.begin(), cumulative_prob.end(), u);
          const auto idx = std::min<std::size_t>(std::size_t(it - cumulative_prob.begin()),
                                                 model.jumps->values.size() - 1);
          dz += model.jumps->values[idx];
        }
      }
    }
    incr.push_back(std::move(dz));
  }
  return IncrementGrid(step, burn, max, seed, std::move(incr));
}

// ---------------------------------------------------------------------------

Vec project_xi(const CointegrationStructure& structure, const Vec& xi) {
  const Mat& b = structure.beta_perp;
  if (b.cols() == 0) return Vec::Zero(xi.size());
  return b * (b.transpose() * xi);
}

Vec random_xi(const CointegrationStructure& structure, double scale, std::uint64_t seed, std::uint64_t stream) {
  const Mat& b = structure.beta_perp;
  CounterStream rng(seed, stream, -1);
  Vec zeta(b.cols());
  for (Eigen::Index i = 0; i < zeta.size(); ++i) zeta(i) = rng.normal();
  return scale * (b * zeta);
}

SolutionPath granger_path(const KernelGrid& kernel, const CointegrationStructure& structure,
                          const IncrementGrid& incr, const Vec& xi, std::optional<long> first_output) {
  const int n = kernel.dim();
  if (incr.dim() != n || xi.size() != n) throw InvalidArgument("path inputs disagree on the dimension");
  const double pi_norm = structure.pi0.norm();
  if ((structure.pi0 * xi).norm() > 1e-8 * pi_norm * xi.norm()) {
    throw XiError("Pi_0 xi != 0; project xi onto the null space of Pi_0 first");
  }
  const double dt = incr.step();
  const long lags = long(std::floor(kernel.horizon / dt + 1e-9));
  if (incr.burn_steps() < lags) {
    throw WindowError("burn-in of " + std::to_string(double(incr.burn_steps()) * dt) +
                      " is shorter than the kernel horizon " + std::to_string(kernel.horizon));
  }
  const long earliest = incr.first_index() - 1 + lags;
  const long first = first_output ? *first_output : earliest;
  if (first < earliest || first > incr.last_index()) throw WindowError("requested output start is not covered");

  // C(j dt), row-major per lag, and the increments as one column-major block.
  std::vector<double> c(std::size_t(lags) * std::size_t(n * n));
  for (long j = 0; j < lags; ++j) {
    const Mat cj = kernel.c_at(double(j) * dt);
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q) c[std::size_t(j) * std::size_t(n * n) + std::size_t(r * n + q)] = cj(r, q);
  }
  const long k0 = incr.first_index();
  Mat dz(n, long(incr.count()));
  for (long k = k0; k <= incr.last_index(); ++k) dz.col(k - k0) = incr.increment(k);
  const auto zc = incr.cumulative();

  SolutionPath path;
  path.step = dt;
  path.first = first;
  path.xi = xi;
  const long count = incr.last_index() - first + 1;
  path.x.resize(n, count);
  path.z.resize(n, count);
  std::vector<double> acc(static_cast<std::size_t>(n));
  for (long m = first; m <= incr.last_index(); ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (long j = 0; j < lags; ++j) {
      const double* cj = &c[std::size_t(j) * std::size_t(n * n)];
      const double* d = dz.col(m - j - k0).data();
      for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += cj[r * n + q] * d[q];
        acc[std::size_t(r)] += s;
      }
    }
    const Vec& z = zc[std::size_t(m + incr.burn_steps())];
    Vec x = xi + structure.c0 * z;
    for (int r = 0; r < n; ++r) x(r) += acc[std::size_t(r)];
    path.x.col(m - first) = x;
    path.z.col(m - first) = z;
  }
  const double ms = dz.colwise().squaredNorm().mean();
  path.truncation_error = kernel.truncation_error_bound * std::sqrt(ms / dt);
  return path;
}

// ---------------------------------------------------------------------------

namespace {

double default_pi_horizon(const SignedMatrixMeasure& measure) {
  if (!measure.has_density()) return measure.max_atom_location();
  const PiFunction pi(measure);
  const double k = pi.decay_constant();
  const double horizon = k > 0.0 ? std::log(k / 1e-12) / pi.decay_rate() : 0.0;
  return std::max(horizon, measure.max_atom_location());
}

struct PiSamples {
  std::vector<Mat> right;
  std::vector<Mat> left;
};

PiSamples sample_pi(const SignedMatrixMeasure& measure, double step, long count) {
  const PiFunction pi(measure);
  PiSamples out;
  for (long j = 0; j <= count; ++j) {
    const double u = double(j) * step;
    out.right.push_back(pi(u));
    out.left.push_back(j == 0 ? out.right.back() : pi.left_limit(u));
  }
  return out;
}

Vec residual_at(const SolutionPath& path, const Mat& pi0, const PiSamples& pi, long s, long t) {
  const double h = path.step;
  const long lags = long(pi.right.size()) - 1;
  if (!(s < t)) throw InvalidArgument("ECF residual needs s < t");
  if (s - lags < path.first_index() || t > path.last_index()) {
    throw WindowError("path history does not cover the pi window for the requested (s, t)");
  }
  Vec integral = 0.5 * (path.at(s) + path.at(t));
  for (long m = s + 1; m < t; ++m) integral += path.at(m);
  integral *= h;
  Vec memory = Vec::Zero(path.x.rows());
  for (long j = 0; j <= lags; ++j) {
    Mat weight;
    if (j == 0) {
      weight = 0.5 * h * pi.right[0];
    } else if (j == lags) {
      weight = 0.5 * h * pi.left[std::size_t(j)];
    } else {
      weight = 0.5 * h * (pi.right[std::size_t(j)] + pi.left[std::size_t(j)]);
    }
    memory += weight * (path.at(t - j) - path.at(s - j));
  }
  return path.at(t) - path.at(s) - pi0 * integral - memory - (path.z_at(t) - path.z_at(s));
}

}  // namespace

std::vector<Vec> ecf_residuals(const SolutionPath& path, const SignedMatrixMeasure& measure,
                               const std::vector<std::pair<long, long>>& pairs, double pi_horizon) {
  const double horizon = pi_horizon > 0.0 ? pi_horizon : default_pi_horizon(measure);
  const long lags = long(std::ceil(horizon / path.step - 1e-9));
  const PiSamples pi = sample_pi(measure, path.step, lags);
  std::vector<Vec> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) out.push_back(residual_at(path, measure.total_mass(), pi, s, t));
  return out;
}

Vec ecf_residual(const SolutionPath& path, const SignedMatrixMeasure& measure, long s, long t, double pi_horizon) {
  return ecf_residuals(path, measure, {{s, t}}, pi_horizon).front();
}

VarianceProfile variance_profile(const std::vector<SolutionPath>& ensemble, const Vec& gamma) {
  if (ensemble.size() < 2) throw InvalidArgument("variance profile needs at least two paths");
  long last = ensemble.front().last_index();
  for (const auto& p : ensemble) {
    if (p.step != ensemble.front().step || p.first_index() > 0) {
      throw InvalidArgument("ensemble paths must share a grid containing t = 0");
    }
    last = std::min(last, p.last_index());
  }
  VarianceProfile out;
  const double count = double(ensemble.size());
  for (long m = 0; m <= last; ++m) {
    double mean = 0.0, sq = 0.0;
    for (const auto& p : ensemble) {
      const double v = gamma.dot(p.x.col(m - p.first) - p.x.col(-p.first));
      mean += v;
      sq += v * v;
    }
    mean /= count;
    out.t.push_back(ensemble.front().time(m));
    out.variance.push_back(std::max(0.0, (sq - count * mean * mean) / (count - 1.0)));
  }
  // Least squares slope over the final half.
  const std::size_t begin = out.t.size() / 2;
  double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0, k = 0.0;
  for (std::size_t i = begin; i < out.t.size(); ++i) {
    st += out.t[i];
    sv += out.variance[i];
    stt += out.t[i] * out.t[i];
    stv += out.t[i] * out.variance[i];
    k += 1.0;
  }
  const double denom = k * stt - st * st;
  out.slope = denom > 0.0 ? (k * stv - st * sv) / denom : 0.0;
  return out;
}

unsigned thread_limit() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COINTEGRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return unsigned(v);
  }
  return hw;
}

std::vector<SolutionPath> simulate_ensemble(const LevyModel& model, const KernelGrid& kernel,
                                            const CointegrationStructure& structure, const Vec& xi,
                                            const EnsembleSpec& spec, unsigned threads) {
  const double burn = spec.t_burn > 0.0 ? spec.t_burn : kernel.horizon;
  std::vector<SolutionPath> out(spec.paths);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t p = next++; p < spec.paths; p = next++) {
      const auto incr = sample_levy(model, spec.step, burn, spec.t_max, spec.seed, p);
      out[p] = granger_path(kernel, structure, incr, xi, 0L);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : thread_limit(),
                                                           unsigned(std::max<std::size_t>(1, spec.paths))));
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex lock;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        work();
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
        next = spec.paths;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace cointegra
