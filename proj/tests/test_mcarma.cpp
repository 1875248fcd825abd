#include <doctest.h>

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/mcarma.hpp"
#include "cointegra/spectral.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

namespace {

// Polynomials evaluated straight from the coefficient lists.
CMat poly(const std::vector<Mat>& coef, int degree, Complex z) {
  const int n = int(coef.empty() ? 1 : coef[0].rows());
  CMat out = CMat::Identity(n, n) * std::pow(z, degree);
  for (int i = 0; i < int(coef.size()); ++i) out += coef[std::size_t(i)].cast<Complex>() * std::pow(z, degree - 1 - i);
  return out;
}

}  // namespace

TEST_CASE("bridged measure has h = Q^{-1} P") {
  for (const auto& spec : {fixtures::mcarma_bivariate(), fixtures::mcarma_random()}) {
    const CharacteristicFunction cf(msdde_from_mcarma(spec));
    for (const Complex z : {Complex(0.7, 0.0), Complex(0.2, 3.0), Complex(2.0, -1.0)}) {
      const CMat p = poly(spec.P, spec.p, z);
      const CMat q = poly(spec.Q, spec.p - 1, z);
      const CMat expect = q.inverse() * p;
      CHECK(max_abs(cf(z) - expect) < 1e-11 * (1.0 + max_abs(expect)));
      CHECK(max_abs(transfer_fn(spec, z) - p.inverse() * q) < 1e-11);
    }
  }
}

TEST_CASE("state space realization has the MCARMA transfer function") {
  const auto spec = fixtures::mcarma_random();
  const auto ss = state_space(spec);
  const int n = int(ss.A.rows());
  CHECK(n == spec.dim * spec.p);
  for (const Complex z : {Complex(1.0, 1.0), Complex(0.3, -2.0)}) {
    const CMat tf = ss.C.cast<Complex>() * (z * CMat::Identity(n, n) - ss.A.cast<Complex>()).inverse() * ss.B.cast<Complex>();
    CHECK(max_abs(tf - transfer_fn(spec, z)) < 1e-11);
  }
}

TEST_CASE("order one bridge reproduces the OU measure exactly") {
  const auto m = msdde_from_mcarma(fixtures::mcarma_p1());
  REQUIRE(m.atoms().size() == 1);
  CHECK_FALSE(m.has_density());
  CHECK(m.atoms()[0].location == 0.0);
  CHECK(m.atoms()[0].weight == fixtures::ou_cointegrated_matrix());
}

TEST_CASE("Fourier identity and C0 routes") {
  for (const auto& spec : {fixtures::mcarma_p1(), fixtures::mcarma_bivariate(), fixtures::mcarma_random()}) {
    const auto m = msdde_from_mcarma(spec);
    CHECK(fourier_identity_error(spec, m, 64) < 1e-12);
    const auto rep = check_cointegrated_conditions(spec);
    CHECK(rep.all_pass());
    CHECK_FALSE(rep.stationary);
    const auto st = cointegration_structure(CharacteristicFunction(m));
    CHECK(rep.rank == st.rank);
    CHECK(max_abs(carma_c0(spec) - st.c0) < 1e-10);
    CHECK(max_abs(c0_residue_numeric(CharacteristicFunction(m)) - st.c0) < 1e-8);
  }
}

TEST_CASE("stationary MCARMA has no C0") {
  MCARMASpec s;
  s.dim = 2;
  s.p = 2;
  s.P = {mat2(3.0, 0.0, 0.0, 3.0), mat2(2.0, 0.0, 0.0, 2.0)};
  s.Q = {mat2(1.0, 0.0, 0.0, 1.0)};
  const auto rep = check_cointegrated_conditions(s);
  CHECK(rep.stationary);
  CHECK_FALSE(rep.rank_in_range);
  CHECK_THROWS_AS(carma_c0(s), PreconditionError);
  CHECK(check_conditions(CharacteristicFunction(msdde_from_mcarma(s))).verdict == Verdict::Stationary);
}

TEST_CASE("unstable Q is rejected") {
  MCARMASpec s;
  s.dim = 1;
  s.p = 2;
  s.P = {Mat::Constant(1, 1, 3.0), Mat::Constant(1, 1, 0.0)};
  s.Q = {Mat::Constant(1, 1, -1.0)};
  CHECK_THROWS_AS(msdde_from_mcarma(s), ConditionError);
  CHECK_FALSE(check_cointegrated_conditions(s).zeros_q);
}

TEST_CASE("MCARMA spec validation") {
  MCARMASpec s = fixtures::mcarma_bivariate();
  s.Q.clear();
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = fixtures::mcarma_bivariate();
  s.P[1] = Mat::Identity(3, 3);
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK(max_abs(fixtures::mcarma_bivariate().q_coeff(0) - Mat::Identity(2, 2)) == 0.0);
  CHECK(max_abs(fixtures::mcarma_bivariate().q_coeff(5)) == 0.0);
}

TEST_CASE("random fixture is deterministic") {
  const auto a = fixtures::mcarma_random();
  const auto b = fixtures::mcarma_random();
  CHECK(a.dim == 3);
  CHECK(a.p == 2);
  CHECK(a.P[1] == b.P[1]);
  CHECK(a.Q[0] == b.Q[0]);
}
