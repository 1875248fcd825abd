#pragma once

#include <string>

#include "cointegra/measure.hpp"

namespace cointegra {

/// h(z) = z I - L[eta](z) on the half-plane Re z > -decay_rate.
class CharacteristicFunction {
 public:
  explicit CharacteristicFunction(SignedMatrixMeasure measure) : measure_(std::move(measure)) {}

  CMat operator()(Complex z) const;
  Complex det(Complex z) const;
  const SignedMatrixMeasure& measure() const { return measure_; }
  int dim() const { return measure_.dim(); }

 private:
  SignedMatrixMeasure measure_;
};

/// Rank structure of Pi_0 = eta([0, inf)) and the long-run matrix C_0.
struct CointegrationStructure {
  Mat pi0;
  int rank = 0;
  Mat alpha;
  Mat beta;
  Mat alpha_perp;
  Mat beta_perp;
  Mat c0;
  /// Pi([0, inf)) = int_0^inf pi(u) du.
  Mat pi_total;
  double rank_tol = 1e-8;
};

/// Rank by singular values relative to sigma_max (r = 0 when Pi_0 = 0), null
/// bases from the singular subspaces, C_0 by the residue formula
/// beta_perp [alpha_perp^T (I - Pi([0,inf))) beta_perp]^{-1} alpha_perp^T.
/// Throws SingularError when the bracket is numerically singular.
CointegrationStructure cointegration_structure(const CharacteristicFunction& cf, double rank_tol = 1e-8);

enum class Verdict { Stationary, Cointegrated, Rejected };
std::string to_string(Verdict v);

struct ScanOptions {
  /// Left edge of the scan rectangle is Re z = -epsilon. Zero selects
  /// min(0.1, decay_rate / 2).
  double epsilon = 0.0;
  /// Initial half-width; enlarged until ||L[eta](z)|| < |z| / 2 outside.
  double radius = 10.0;
  /// Maximum bisection depth per boundary segment.
  int refinement = 16;
  /// Radius of the indentation that excludes the origin.
  double indentation = 1e-3;
};

struct ConditionReport {
  int zero_count_right_halfplane = 0;
  bool zero_at_origin = false;
  bool pole_simple = false;
  bool route_a_pass = false;
  bool route_b_pass = false;
  Verdict verdict = Verdict::Rejected;
  // Scan diagnostics.
  int origin_multiplicity = 0;
  double epsilon = 0.0;
  double radius = 0.0;
  int rank = 0;
  double bracket_condition = 0.0;
};

/// Checks the zero/pole conditions on h by two routes. Route A: argument
/// principle on the indented rectangle plus the analytic limit of z h(z)^{-1}
/// along z = 10^-k. Route B: the rank of Pi_0 and invertibility of
/// alpha_perp^T (I - Pi([0,inf))) beta_perp. Throws ScanResolutionError when
/// the scan is inconclusive.
ConditionReport check_conditions(const CharacteristicFunction& cf, const ScanOptions& scan = {},
                                 double rank_tol = 1e-8);

/// Richardson-extrapolated limit of z h(z)^{-1} along z = 2^-k, k = 4..20.
/// Throws DivergenceError when the sequence is not Cauchy (higher-order pole).
Mat c0_residue_numeric(const CharacteristicFunction& cf);

}  // namespace cointegra
