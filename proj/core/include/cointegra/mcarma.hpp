#pragma once

#include <string>
#include <vector>

#include "cointegra/measure.hpp"

namespace cointegra {

/// P(z) = I z^p + P_1 z^{p-1} + ... + P_p and Q(z) = I z^{p-1} + Q_1 z^{p-2} + ... + Q_{p-1}.
struct MCARMASpec {
  int dim = 1;
  int p = 1;
  std::vector<Mat> P;  // P_1..P_p
  std::vector<Mat> Q;  // Q_1..Q_{p-1}

  void validate() const;
  /// P_i with P_0 = I.
  Mat p_coeff(int i) const;
  /// Q_i with Q_0 = I and Q_i = 0 for i >= p.
  Mat q_coeff(int i) const;
  CMat p_at(Complex z) const;
  CMat q_at(Complex z) const;
};

struct StateSpaceRealization {
  Mat A;  // np x np block companion
  Mat B;  // np x n, blocks B_1..B_p
  Mat C;  // np x n, [I, 0, ..., 0]^T
};

/// Delay measure eta_0 delta_0 + H exp(F t) G dt with eta_0 = Q_1 - P_1 and
/// H (zI - F)^{-1} G = Q(z)^{-1} R(z), R(z) = Q(z)(zI - eta_0) - P(z); F is the
/// observer-form block companion of Q. Throws ConditionError when det Q has a
/// zero with Re >= 0 and VerificationError when the Fourier identity fails at
/// any of 32 frequencies.
SignedMatrixMeasure msdde_from_mcarma(const MCARMASpec& spec);

/// max over `count` log-spaced y in [1e-2, 1e2] of
/// ||F[eta_1](y) - (iy I - eta_0 - Q(iy)^{-1} P(iy))|| / max(1, ||Q^{-1}P||).
double fourier_identity_error(const MCARMASpec& spec, const SignedMatrixMeasure& measure, int count);

struct MCARMAConditionReport {
  bool zeros_p = false;         // det P zeros have Re < 0 or sit at 0
  bool rank_in_range = false;   // 0 < rank P_p < n
  bool bracket_invertible = false;
  bool zeros_q = false;         // det Q zeros have Re < 0
  bool stationary = false;      // det P and det Q zeros all in Re < 0
  int rank = 0;
  int zeros_p_right = 0;
  int zeros_p_origin = 0;
  int zeros_q_right = 0;
  double bracket_condition = 0.0;
  std::vector<std::string> notes;
  bool all_pass() const { return zeros_p && rank_in_range && bracket_invertible && zeros_q; }
};

MCARMAConditionReport check_cointegrated_conditions(const MCARMASpec& spec, double rank_tol = 1e-8);

/// beta_perp [alpha_perp^T P_{p-1} beta_perp]^{-1} alpha_perp^T Q_{p-1} from
/// the SVD of P_p. PreconditionError unless 0 < rank P_p < n; SingularError
/// when the bracket is numerically singular.
Mat carma_c0(const MCARMASpec& spec, double rank_tol = 1e-8);

/// B_1 = I, B_{m+1} = Q_m - sum_{i=1}^m P_i B_{m+1-i}.
StateSpaceRealization state_space(const MCARMASpec& spec);

/// P(z)^{-1} Q(z); SingularError at zeros of det P.
CMat transfer_fn(const MCARMASpec& spec, Complex z);

}  // namespace cointegra
