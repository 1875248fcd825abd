#include <doctest.h>

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/spectral.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

TEST_CASE("characteristic function of a dirac at zero is zI - A") {
  const Mat a = mat2(-1.0, 1.0, 0.0, 0.0);
  const CharacteristicFunction cf(SignedMatrixMeasure::dirac(a));
  for (const Complex z : {Complex(0.5, 0.0), Complex(1.0, 3.0), Complex(-0.05, 2.0)}) {
    const CMat expect = z * CMat::Identity(2, 2) - a.cast<Complex>();
    CHECK(max_abs(CMat(cf(z) - expect)) < 1e-15);
    CHECK(std::abs(cf.det(z) - expect.determinant()) < 1e-14);
  }
}

TEST_CASE("unit delay characteristic function is z + exp(-z)") {
  const CharacteristicFunction cf(fixtures::unit_delay());
  const Complex z(0.3, 1.7);
  CHECK(std::abs(cf(z)(0, 0) - (z + std::exp(-z))) < 1e-14);
}

TEST_CASE("stationary OU") {
  const CharacteristicFunction cf(fixtures::ou_stationary());
  const auto rep = check_conditions(cf);
  CHECK(rep.verdict == Verdict::Stationary);
  CHECK(rep.zero_count_right_halfplane == 0);
  CHECK_FALSE(rep.zero_at_origin);
  const auto st = cointegration_structure(cf);
  CHECK(st.rank == 2);
  CHECK(max_abs(st.c0) < 1e-14);
}

TEST_CASE("cointegrated OU structure") {
  const CharacteristicFunction cf(fixtures::ou_cointegrated());
  const auto rep = check_conditions(cf);
  CHECK(rep.verdict == Verdict::Cointegrated);
  CHECK(rep.route_a_pass);
  CHECK(rep.route_b_pass);
  CHECK(rep.pole_simple);
  CHECK(rep.origin_multiplicity == 1);
  const auto st = cointegration_structure(cf);
  CHECK(st.rank == 1);
  CHECK(max_abs(Mat(st.c0 - mat2(0.0, 1.0, 0.0, 1.0))) < 1e-12);
  CHECK(max_abs(Mat(c0_residue_numeric(cf) - st.c0)) < 1e-8);
  // C_0 Pi_0 = Pi_0 C_0 = 0 and beta^T C_0 = 0.
  CHECK(max_abs(Mat(st.c0 * st.pi0)) < 1e-14);
  CHECK(max_abs(Mat(st.pi0 * st.c0)) < 1e-14);
  CHECK(max_abs(Mat(st.beta.transpose() * st.c0)) < 1e-14);
}

TEST_CASE("unit delay is stationary") {
  const CharacteristicFunction cf(fixtures::unit_delay());
  CHECK(check_conditions(cf).verdict == Verdict::Stationary);
}

TEST_CASE("explosive root is rejected") {
  const CharacteristicFunction cf(SignedMatrixMeasure::dirac(mat2(0.5, 0.0, 0.0, -1.0)));
  const auto rep = check_conditions(cf);
  CHECK(rep.verdict == Verdict::Rejected);
  CHECK(rep.zero_count_right_halfplane == 1);
}

TEST_CASE("second order pole at the origin is rejected") {
  const CharacteristicFunction cf(SignedMatrixMeasure::dirac(mat2(0.0, 1.0, 0.0, 0.0)));
  const auto rep = check_conditions(cf);
  CHECK(rep.verdict == Verdict::Rejected);
  CHECK_FALSE(rep.pole_simple);
  CHECK_THROWS_AS(cointegration_structure(cf), SingularError);
  CHECK_THROWS_AS(c0_residue_numeric(cf), DivergenceError);
}

TEST_CASE("zero measure is a pure random walk") {
  const CharacteristicFunction cf(fixtures::zero_measure(2));
  const auto st = cointegration_structure(cf);
  CHECK(st.rank == 0);
  CHECK(max_abs(Mat(st.c0 - Mat::Identity(2, 2))) < 1e-14);
}

TEST_CASE("delayed cointegration with a nontrivial Pi total") {
  // eta = A delta_1: Pi([0,inf)) = -A, so C_0 = beta_perp [alpha_perp^T (I + A) beta_perp]^{-1} alpha_perp^T.
  const Mat a = mat2(-0.5, 0.5, 0.0, 0.0);
  const CharacteristicFunction cf(SignedMatrixMeasure::dirac(a, 1.0));
  const auto st = cointegration_structure(cf);
  CHECK(st.rank == 1);
  CHECK(max_abs(Mat(st.pi_total + a)) < 1e-14);
  CHECK(max_abs(Mat(c0_residue_numeric(cf) - st.c0)) < 1e-8);
  CHECK(check_conditions(cf).verdict == Verdict::Cointegrated);
}

TEST_CASE("scan epsilon outside the decay strip is a domain error") {
  const CharacteristicFunction cf(fixtures::ou_cointegrated());
  ScanOptions opts;
  opts.epsilon = 5.0;
  CHECK_THROWS_AS(check_conditions(cf, opts), DomainError);
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::Cointegrated) == "Cointegrated");
  CHECK(to_string(Verdict::Stationary) == "Stationary");
  CHECK(to_string(Verdict::Rejected) == "Rejected");
}
