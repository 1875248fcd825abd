#pragma once

#include <vector>

#include "cointegra/measure.hpp"
#include "cointegra/spectral.hpp"

namespace cointegra {

/// Granger kernels sampled at t_k = k * step, k = 0..N.
///
/// Values between grid points use four-point Lagrange (cubic) interpolation;
/// this is part of the kernel CSV contract.
struct KernelGrid {
  double step = 0.0;
  double horizon = 0.0;
  std::vector<Mat> c_tilde;  // C~(t_k), C~(0) = I
  std::vector<Mat> c;        // C(t_k) = C~(t_k) - C_0
  std::vector<Mat> f;        // f(t_k), right-continuous
  std::vector<Mat> f_left;   // f(t_k-), differs from f only at atom locations
  Mat c0;
  /// Certified bound on ||C(T)|| = ||int_T^inf f||.
  double truncation_error_bound = 0.0;

  std::size_t size() const { return c.size(); }
  double time(std::size_t k) const { return step * double(k); }
  int dim() const { return int(c0.rows()); }

  /// C(t) by cubic interpolation; zero for t < 0 and past the horizon.
  Mat c_at(double t) const;
  Mat c_tilde_at(double t) const;
  Mat f_at(double t) const;
};

/// Default grid step 1e-3 / decay_rate clamped to [1e-4, 1e-2].
double default_step(const SignedMatrixMeasure& measure);

/// Solves C~' = C~ * eta, C~(0) = I with classical RK4 (delayed atoms read
/// the cubic history interpolant; a matrix-exponential density enters through
/// an auxiliary state S' = C~ H + S F so that C~ * eta_1 = S G), and solves f
/// independently from F' = f * eta, f = F - eta([0, .]).
/// Throws InstabilityError when ||C|| exceeds 1e3 max(1, ||C(0)||).
KernelGrid solve_kernel(const SignedMatrixMeasure& measure, const CointegrationStructure& structure,
                        double step, double horizon);

/// f on [0, horizon] from its own equation only (no C_0 needed).
std::vector<Mat> solve_f(const SignedMatrixMeasure& measure, double step, std::size_t steps,
                         std::vector<Mat>* f_left = nullptr);

struct LaplaceCheckEntry {
  Complex z;
  double deviation_f = 0.0;
  double deviation_c = 0.0;
};

struct LaplaceReport {
  std::vector<LaplaceCheckEntry> entries;
  double max_deviation_f = 0.0;
  double max_deviation_c = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Numerical transforms of f and C against I - z h(z)^{-1} and
/// h(z)^{-1} - C_0 / z. Samples need Re z >= 0.1.
LaplaceReport laplace_check(const KernelGrid& kernel, const CharacteristicFunction& cf,
                            const std::vector<Complex>& z_samples, double tol);

/// Horizon T with K_f exp(-eps T) <= target, eps = decay_rate / 2 and
/// K_f = 1.5 max_t e^{eps t} ||f(t)|| from a pilot solve on [0, 20 / decay_rate].
double truncation_horizon(const SignedMatrixMeasure& measure, double target);

/// int_0^T f(t) dt on the kernel grid, splitting panels at jumps of f.
Mat integrate_f(const KernelGrid& kernel);

/// max_k ||f(t_k) + (C(t_{k+1}) - C(t_{k-1})) / (2 step)|| away from jumps.
double derivative_consistency(const KernelGrid& kernel);

struct StationaryKernel {
  SampledMatrixFunction g;
  /// max over the grid of ||f + g * eta||.
  double consistency = 0.0;
};

/// g with L[g] = h^{-1} (stationary case). PreconditionError unless
/// rank(Pi_0) = n.
StationaryKernel stationary_kernel_g(const SignedMatrixMeasure& measure, double step, double horizon,
                                     double rank_tol = 1e-8);

}  // namespace cointegra
