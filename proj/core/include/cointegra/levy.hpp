#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cointegra/kernel.hpp"
#include "cointegra/measure.hpp"
#include "cointegra/spectral.hpp"

namespace cointegra {

/// Compound Poisson jump part: jumps arrive at `rate` per unit time and are
/// either gaussian(mean, cov) or drawn from a finite list with probabilities.
struct JumpSpec {
  enum class Kind { Gaussian, Discrete };
  Kind kind = Kind::Gaussian;
  double rate = 0.0;
  Vec mean;
  Mat cov;
  std::vector<Vec> values;
  std::vector<double> probabilities;
};

struct LevyModel {
  int dim = 1;
  Vec drift;
  Mat gaussian_cov;
  std::optional<JumpSpec> jumps;

  /// Throws InvalidArgument on shape errors and CholeskyError when the
  /// gaussian covariance (or a gaussian jump covariance) is not PSD.
  void validate() const;
  /// Sigma_g + rate E[J J^T].
  Mat second_moment() const;
};

/// Increments dZ_k = Z_{k dt} - Z_{(k-1) dt} for k = first_index() .. last_index(),
/// covering the window [-burn_steps dt, max_steps dt]. Z_0 = 0.
class IncrementGrid {
 public:
  IncrementGrid() = default;
  IncrementGrid(double step, long burn_steps, long max_steps, std::uint64_t seed, std::vector<Vec> increments);

  double step() const { return step_; }
  long burn_steps() const { return burn_; }
  long max_steps() const { return max_; }
  long first_index() const { return 1 - burn_; }
  long last_index() const { return max_; }
  std::size_t count() const { return increments_.size(); }
  std::uint64_t seed() const { return seed_; }
  int dim() const { return increments_.empty() ? 0 : int(increments_[0].size()); }

  const Vec& increment(long k) const { return increments_[std::size_t(k - first_index())]; }
  /// Z at grid time m dt for m in [-burn_steps, max_steps].
  Vec z_at(long m) const;
  /// Cumulative Z on the whole window, index m + burn_steps.
  std::vector<Vec> cumulative() const;

  /// Sums consecutive blocks of `factor` increments (step factor * dt). The
  /// window ends must be multiples of factor.
  IncrementGrid coarsen(int factor) const;
  /// a * this + b * other on the same window.
  IncrementGrid combine(double a, const IncrementGrid& other, double b) const;

 private:
  double step_ = 0.0;
  long burn_ = 0;
  long max_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Vec> increments_;
};

/// Draws increments on [-t_burn, t_max]. Increment k of stream `stream` uses
/// CounterStream(seed, stream, k): n normals for the gaussian part, then one
/// Poisson count by inversion, then per jump either n normals (gaussian jumps)
/// or one uniform (discrete jumps).
IncrementGrid sample_levy(const LevyModel& model, double step, double t_burn, double t_max,
                          std::uint64_t seed, std::uint64_t stream = 0);

/// Solution on the grid times m dt, m = first_index() .. last_index(). Column
/// i of x (and z) holds time (first + i) dt.
struct SolutionPath {
  double step = 0.0;
  long first = 0;
  Mat x;
  Mat z;
  Vec xi;
  /// Heuristic size of the kernel tail dropped by the finite burn-in.
  double truncation_error = 0.0;

  long first_index() const { return first; }
  long last_index() const { return first + long(x.cols()) - 1; }
  double time(long m) const { return step * double(m); }
  Vec at(long m) const { return x.col(m - first); }
  Vec z_at(long m) const { return z.col(m - first); }
};

/// Projects xi onto the null space of Pi_0 (span of beta_perp).
Vec project_xi(const CointegrationStructure& structure, const Vec& xi);

/// Gaussian xi = scale * beta_perp * zeta, zeta standard normal from
/// CounterStream(seed, stream, -1).
Vec random_xi(const CointegrationStructure& structure, double scale, std::uint64_t seed, std::uint64_t stream);

/// X_t = xi + C_0 Z_t + sum_k C(t - k dt) dZ_k over the kernel horizon. Output
/// starts at the earliest grid time whose window is covered. Throws
/// WindowError when the burn-in is shorter than the kernel horizon and
/// XiError when ||Pi_0 xi|| > 1e-8 ||Pi_0|| ||xi||. `first_output` (grid
/// index) trims earlier times.
SolutionPath granger_path(const KernelGrid& kernel, const CointegrationStructure& structure,
                          const IncrementGrid& incr, const Vec& xi,
                          std::optional<long> first_output = std::nullopt);

/// Residual of X_t - X_s = Pi_0 int_s^t X + int_0^U pi(u)(X_{t-u} - X_{s-u}) du
/// + Z_t - Z_s with trapezoid quadrature on the path grid. `pi_horizon` <= 0
/// selects the last atom location for atom-only measures and the 1e-12 decay
/// point of the pi certificate otherwise. Throws WindowError when the path
/// history does not reach back to s - U.
Vec ecf_residual(const SolutionPath& path, const SignedMatrixMeasure& measure, long s, long t,
                 double pi_horizon = 0.0);
std::vector<Vec> ecf_residuals(const SolutionPath& path, const SignedMatrixMeasure& measure,
                               const std::vector<std::pair<long, long>>& pairs, double pi_horizon = 0.0);

struct VarianceProfile {
  std::vector<double> t;
  std::vector<double> variance;
  double slope = 0.0;
};

/// Cross-sectional variance of gamma^T (X_t - X_0) over t >= 0 and the least
/// squares slope over the final half. Needs at least two paths on one grid.
VarianceProfile variance_profile(const std::vector<SolutionPath>& ensemble, const Vec& gamma);

/// Worker count: COINTEGRA_THREADS when set (>= 1), else hardware concurrency.
unsigned thread_limit();

struct EnsembleSpec {
  double step = 0.01;
  double t_max = 10.0;
  double t_burn = 0.0;  // 0 selects the kernel horizon
  std::size_t paths = 1;
  std::uint64_t seed = 0;
};

/// Paths 0..paths-1 use stream = path id and keep t >= 0 only; results are
/// ordered by path id and independent of the number of workers.
std::vector<SolutionPath> simulate_ensemble(const LevyModel& model, const KernelGrid& kernel,
                                            const CointegrationStructure& structure, const Vec& xi,
                                            const EnsembleSpec& spec, unsigned threads = 0);

}  // namespace cointegra
