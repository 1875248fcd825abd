#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "cointegra/linalg.hpp"

namespace cointegra {

/// Point mass `weight` located at `location` >= 0.
struct Atom {
  double location = 0.0;
  Mat weight;
};

/// Density t -> H exp(F t) G on [0, inf). F must be Hurwitz.
struct MatExpDensity {
  Mat H;  // n x m
  Mat F;  // m x m
  Mat G;  // m x n
};

/// Density given by samples on a uniform grid, read as the piecewise linear
/// interpolant on [0, (N-1) step] and zero beyond. The pair (tail_K,
/// tail_lambda) certifies |density(t)| <= tail_K exp(-tail_lambda t) past the
/// grid; integrals report that tail as their error bound.
struct SampledDensity {
  double step = 0.0;
  std::vector<Mat> values;
  double tail_K = 0.0;
  double tail_lambda = 1.0;
};

using Density = std::variant<std::monostate, MatExpDensity, SampledDensity>;

/// Uniformly sampled matrix function on [0, T]; zero for negative arguments.
class SampledMatrixFunction {
 public:
  SampledMatrixFunction() = default;
  SampledMatrixFunction(double step, std::vector<Mat> values);

  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  double horizon() const { return values_.empty() ? 0.0 : step_ * double(values_.size() - 1); }
  const Mat& operator[](std::size_t k) const { return values_[k]; }
  const std::vector<Mat>& values() const { return values_; }

  /// Four-point Lagrange interpolation on the nearest nodes inside [0, T].
  Mat cubic_at(double t) const;
  Mat linear_at(double t) const;

 private:
  double step_ = 0.0;
  std::vector<Mat> values_;
};

/// Four-point Lagrange interpolation through samples at i*step, i in [lo, hi],
/// choosing the stencil closest to t. Shared by the kernel solver history.
Mat lagrange_interpolate(const std::vector<Mat>& values, double step, std::size_t last, double t);

/// Signed n x n matrix measure on [0, inf): finitely many atoms plus an
/// optional density, with a certified exponential decay rate.
///
/// Immutable after construction; all queries are const and thread safe.
class SignedMatrixMeasure {
 public:
  /// Validates the invariants and derives the decay rate when it is not
  /// supplied: -max Re eig(F) / 2 for matrix-exponential densities,
  /// tail_lambda / 2 for sampled densities and 1 for atom-only measures.
  SignedMatrixMeasure(int dim, std::vector<Atom> atoms, Density density = {},
                      std::optional<double> decay_rate = std::nullopt);

  static SignedMatrixMeasure zero(int dim, std::optional<double> decay_rate = std::nullopt);
  static SignedMatrixMeasure dirac(const Mat& weight, double location = 0.0,
                                   std::optional<double> decay_rate = std::nullopt);

  int dim() const { return dim_; }
  double decay_rate() const { return decay_rate_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Density& density() const { return density_; }
  bool has_density() const { return !std::holds_alternative<std::monostate>(density_); }
  bool is_matexp() const { return std::holds_alternative<MatExpDensity>(density_); }
  double max_atom_location() const;

  /// Pi_0 = eta([0, inf)).
  const Mat& total_mass() const { return total_mass_; }
  /// Absolute error bound attached to total_mass (tail of sampled densities).
  double total_mass_error() const { return total_mass_error_; }

  /// eta([0, t]); zero for t < 0.
  Mat cdf(double t) const;
  /// eta([0, t)), the left limit of cdf.
  Mat cdf_left(double t) const;
  /// Integral of the density over [0, t].
  Mat density_integral(double t) const;
  Mat density_at(double t) const;
  /// Integral of t eta(dt).
  const Mat& first_moment() const { return first_moment_; }

  /// Laplace transform; DomainError unless Re z > -decay_rate.
  CMat laplace(Complex z) const;

  /// (kernel * eta)(t) = sum_k kernel(t - t_k) A_k + int kernel(t - u) density(u) du.
  /// Trapezoid on the kernel grid; t must be a grid time (GridError otherwise).
  Mat convolve(const SampledMatrixFunction& kernel, double t) const;

  /// Upper bound on int e^{rate t} |eta|(dt) (Frobenius norms), i.e. a bound on
  /// ||L[eta](z)|| over Re z >= -rate. Requires rate < decay_rate for densities.
  double exponential_moment(double rate) const;

  /// Time beyond which the density carries at most `tol` absolute mass.
  double density_support(double tol) const;

 private:
  Mat atoms_cdf(double t, bool inclusive) const;

  int dim_;
  std::vector<Atom> atoms_;
  Density density_;
  double decay_rate_ = 1.0;
  Mat total_mass_;
  double total_mass_error_ = 0.0;
  Mat first_moment_;
};

/// pi(t) = eta([0, t]) - eta([0, inf)), with its decay certificate
/// ||pi(t)|| <= K exp(-eps t), eps = decay_rate / 2.
class PiFunction {
 public:
  explicit PiFunction(SignedMatrixMeasure measure);

  Mat operator()(double t) const;
  Mat left_limit(double t) const;
  /// Pi([0, inf)) = int_0^inf pi(u) du = -int t eta(dt).
  Mat total() const { return -measure_.first_moment(); }
  double decay_constant() const { return decay_constant_; }
  double decay_rate() const { return 0.5 * measure_.decay_rate(); }
  const SignedMatrixMeasure& measure() const { return measure_; }

 private:
  SignedMatrixMeasure measure_;
  double decay_constant_;
};

}  // namespace cointegra
