#include <doctest.h>

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/kernel.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

namespace {

CointegrationStructure structure_of(const SignedMatrixMeasure& m) {
  return cointegration_structure(CharacteristicFunction(m));
}

// y' = -y(t - 1), y(0) = 1, y = 0 before 0: method of steps on [0, 3].
double unit_delay_closed(double t) {
  if (t <= 1.0) return 1.0;
  if (t <= 2.0) return 2.0 - t;
  return -(3.0 * (t - 2.0) - 0.5 * (t * t - 4.0));
}

// eta = -a delta_0 + b e^{-lambda t} dt in one dimension.
SignedMatrixMeasure mixed_scalar(double a, double b, double lambda) {
  MatExpDensity d;
  d.H = Mat::Constant(1, 1, b);
  d.F = Mat::Constant(1, 1, -lambda);
  d.G = Mat::Identity(1, 1);
  return SignedMatrixMeasure(1, {Atom{0.0, Mat::Constant(1, 1, -a)}}, d);
}

}  // namespace

TEST_CASE("cointegrated OU kernels match closed forms") {
  const auto m = fixtures::ou_cointegrated();
  const auto k = solve_kernel(m, structure_of(m), 1e-3, 10.0);
  REQUIRE(k.size() == 10001);
  double err = 0.0;
  for (std::size_t i = 0; i < k.size(); i += 7) {
    const double e = std::exp(-k.time(i));
    err = std::max(err, max_abs(k.c_tilde[i] - mat2(e, 1.0 - e, 0.0, 1.0)));
    err = std::max(err, max_abs(k.c[i] - mat2(e, -e, 0.0, 0.0)));
    err = std::max(err, max_abs(k.f[i] - mat2(e, -e, 0.0, 0.0)));
  }
  CHECK(err < 1e-10);
  CHECK(max_abs(k.c_tilde[0] - Mat::Identity(2, 2)) == 0.0);
  // Certified, hence above the true tail ||C(10)|| = sqrt(2) e^{-10}.
  CHECK(k.truncation_error_bound > std::sqrt(2.0) * std::exp(-10.0));
  CHECK(k.truncation_error_bound < 0.05);
}

TEST_CASE("unit delay kernel follows the method of steps") {
  const auto m = fixtures::unit_delay();
  const auto k = solve_kernel(m, structure_of(m), 1e-3, 3.0);
  double err = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) err = std::max(err, std::abs(k.c_tilde[i](0, 0) - unit_delay_closed(k.time(i))));
  CHECK(err < 1e-6);
  // C~ = C in the stationary case and f jumps at the atom.
  CHECK(std::abs(k.c[1500](0, 0) - k.c_tilde[1500](0, 0)) < 1e-15);
  CHECK(std::abs(k.f_left[1000](0, 0) - k.f[1000](0, 0)) > 0.5);
}

TEST_CASE("matrix exponential density kernel matches partial fractions") {
  // h(z) = z + 2 - 1 / (z + 1); C~ = L^{-1}[(z + 1) / (z^2 + 3z + 1)].
  const auto m = mixed_scalar(2.0, 1.0, 1.0);
  const auto k = solve_kernel(m, structure_of(m), 1e-3, 8.0);
  const double r1 = (-3.0 + std::sqrt(5.0)) / 2.0, r2 = (-3.0 - std::sqrt(5.0)) / 2.0;
  double err = 0.0;
  for (std::size_t i = 0; i < k.size(); i += 3) {
    const double t = k.time(i);
    const double expect = (r1 + 1.0) / (r1 - r2) * std::exp(r1 * t) + (r2 + 1.0) / (r2 - r1) * std::exp(r2 * t);
    err = std::max(err, std::abs(k.c_tilde[i](0, 0) - expect));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("sampled density agrees with the matrix exponential form") {
  const auto exact = mixed_scalar(2.0, 1.0, 1.0);
  SampledDensity sd;
  sd.step = 1e-3;
  for (int i = 0; i <= 30000; ++i) sd.values.push_back(Mat::Constant(1, 1, std::exp(-1e-3 * i)));
  sd.tail_K = 1.0;
  sd.tail_lambda = 1.0;
  const SignedMatrixMeasure sampled(1, {Atom{0.0, Mat::Constant(1, 1, -2.0)}}, sd, 0.5);
  const auto a = solve_kernel(exact, structure_of(exact), 1e-3, 5.0);
  const auto b = solve_kernel(sampled, structure_of(sampled), 1e-3, 5.0);
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a.c_tilde[i](0, 0) - b.c_tilde[i](0, 0)));
  CHECK(err < 1e-6);
}

TEST_CASE("both routes agree and C_0 = I - int f") {
  for (const auto& m : {fixtures::ou_cointegrated(), fixtures::unit_delay(), mixed_scalar(2.0, 1.0, 1.0)}) {
    const auto st = structure_of(m);
    const auto k = solve_kernel(m, st, 1e-3, truncation_horizon(m, 1e-9));
    const int n = m.dim();
    CHECK(max_abs(Mat(Mat::Identity(n, n) - integrate_f(k) - st.c0)) < 1e-6);
    // Central differences are first order at the kinks of the delay solution.
    CHECK(derivative_consistency(k) < (m.has_density() || m.max_atom_location() == 0.0 ? 1e-5 : 5e-4));
  }
}

TEST_CASE("laplace identities hold for the OU fixtures") {
  const std::vector<Complex> z{0.5, 1.0, 2.0, Complex(1.0, 3.0)};
  for (const auto& m : {fixtures::ou_stationary(), fixtures::ou_cointegrated()}) {
    const CharacteristicFunction cf(m);
    const auto k = solve_kernel(m, structure_of(m), 1e-3, truncation_horizon(m, 1e-8));
    const auto rep = laplace_check(k, cf, z, 1e-5);
    CHECK(rep.pass);
    CHECK(rep.max_deviation_f < 1e-7);
    CHECK(rep.max_deviation_c < 1e-7);
    CHECK(rep.entries.size() == 4);
  }
}

TEST_CASE("laplace samples too close to the imaginary axis fail") {
  const auto m = fixtures::ou_stationary();
  const auto k = solve_kernel(m, structure_of(m), 1e-2, 10.0);
  const auto rep = laplace_check(k, CharacteristicFunction(m), {Complex(0.01, 0.0)}, 1e-5);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("truncation horizon shrinks the tail bound to the target") {
  const auto m = fixtures::ou_cointegrated();
  const double t8 = truncation_horizon(m, 1e-8);
  const double t4 = truncation_horizon(m, 1e-4);
  CHECK(t8 > t4);
  const auto k = solve_kernel(m, structure_of(m), 1e-2, t8);
  // The horizon comes from a pilot solve; the final certificate stays close.
  CHECK(k.truncation_error_bound <= 1e-7);
  CHECK(k.truncation_error_bound < solve_kernel(m, structure_of(m), 1e-2, t4).truncation_error_bound);
  CHECK(truncation_horizon(fixtures::zero_measure(2), 1e-8) == 0.0);
  CHECK(truncation_horizon(fixtures::unit_delay(), 1e-8) >= 1.0);
}

TEST_CASE("stationary kernel g for the unit delay") {
  const auto g = stationary_kernel_g(fixtures::unit_delay(), 1e-3, 4.0, 1e-8);
  // g = C~ for the delay equation: 1 on [0, 1], then the method of steps.
  CHECK(std::abs(g.g.linear_at(1.5)(0, 0) - 0.5) < 1e-8);
  CHECK(std::abs(g.g.linear_at(0.5)(0, 0) - unit_delay_closed(0.5)) < 1e-8);
  CHECK(std::abs(g.g.linear_at(2.5)(0, 0) - unit_delay_closed(2.5)) < 1e-6);
  CHECK(g.consistency < 1e-5);
  CHECK_THROWS_AS(stationary_kernel_g(fixtures::ou_cointegrated(), 1e-3, 4.0, 1e-8), PreconditionError);
}

TEST_CASE("kernel solver rejects bad input and divergence") {
  const auto m = fixtures::ou_stationary();
  CHECK_THROWS_AS(solve_kernel(m, structure_of(m), 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(solve_kernel(m, structure_of(m), 1e-2, -1.0), InvalidArgument);
  const auto explosive = SignedMatrixMeasure::dirac(mat2(1.0, 0.0, 0.0, -1.0));
  CHECK_THROWS_AS(solve_kernel(explosive, structure_of(explosive), 1e-2, 20.0), InstabilityError);
  CHECK(default_step(m) == doctest::Approx(1e-3));
  CHECK(default_step(fixtures::unit_delay()) == doctest::Approx(5e-3));
}

TEST_CASE("kernel interpolation") {
  const auto m = fixtures::ou_stationary();
  const auto k = solve_kernel(m, structure_of(m), 1e-2, 5.0);
  CHECK(std::abs(k.c_at(1.234)(0, 0) - std::exp(-1.234)) < 1e-7);
  CHECK(max_abs(k.c_at(-0.5)) == 0.0);
  CHECK(max_abs(k.c_at(6.0)) == 0.0);
  CHECK(max_abs(k.c_tilde_at(6.0) - k.c0) == 0.0);
}
