#include <doctest.h>

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/linalg.hpp"
#include "cointegra/measure.hpp"
#include "cointegra/random.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

namespace {

SignedMatrixMeasure scalar_exp_density(double lambda, double weight) {
  MatExpDensity d;
  d.H = Mat::Constant(1, 1, weight);
  d.F = Mat::Constant(1, 1, -lambda);
  d.G = Mat::Identity(1, 1);
  return SignedMatrixMeasure(1, {}, d);
}

}  // namespace

TEST_CASE("dirac laplace transform is A exp(-z t0)") {
  const Mat a = mat2(-1.0, 0.5, 0.25, -2.0);
  const auto m = SignedMatrixMeasure::dirac(a, 1.5);
  for (const Complex z : {Complex(0.3, 0.0), Complex(1.0, 2.0), Complex(2.0, -5.0)}) {
    const CMat expect = a.cast<Complex>() * std::exp(-1.5 * z);
    CHECK(max_abs(CMat(m.laplace(z) - expect)) < 1e-14);
  }
  CHECK(max_abs(m.total_mass() - a) == 0.0);
  CHECK(max_abs(m.first_moment() - 1.5 * a) < 1e-15);
}

TEST_CASE("matrix exponential density transform matches quadrature") {
  MatExpDensity d;
  d.F = mat2(-1.0, 0.3, 0.0, -2.0);
  d.H = mat2(1.0, 0.5, -0.2, 1.0);
  d.G = mat2(0.7, 0.0, 0.1, 1.0);
  const SignedMatrixMeasure m(2, {}, d);
  const Complex z(0.5, 1.0);
  // Independent: Simpson on [0, 40] of exp(-z t) H e^{Ft} G with e^{Ft} by eigendecomposition.
  Eigen::EigenSolver<Mat> es(d.F);
  const CMat v = es.eigenvectors();
  const CMat vinv = v.inverse();
  auto integrand = [&](double t) {
    CMat e = CMat::Zero(2, 2);
    for (int i = 0; i < 2; ++i) e(i, i) = std::exp(es.eigenvalues()[i] * t);
    return CMat(std::exp(-z * t) * d.H.cast<Complex>() * v * e * vinv * d.G.cast<Complex>());
  };
  const CMat quad = testing::simpson(integrand, 0.0, 40.0, 8000);
  CHECK(max_abs(CMat(m.laplace(z) - quad)) < 1e-9);
  const CMat closed = d.H.cast<Complex>() * (z * CMat::Identity(2, 2) - d.F.cast<Complex>()).inverse() * d.G.cast<Complex>();
  CHECK(max_abs(CMat(m.laplace(z) - closed)) < 1e-13);
}

TEST_CASE("cdf and density integral of a scalar exponential density") {
  const auto m = scalar_exp_density(2.0, 3.0);
  for (double t : {0.0, 0.1, 1.0, 5.0}) {
    const double expect = 1.5 * (1.0 - std::exp(-2.0 * t));
    CHECK(std::abs(m.cdf(t)(0, 0) - expect) < 1e-13);
    CHECK(std::abs(m.density_integral(t)(0, 0) - expect) < 1e-13);
    CHECK(std::abs(m.density_at(t)(0, 0) - 3.0 * std::exp(-2.0 * t)) < 1e-13);
  }
  CHECK(std::abs(m.total_mass()(0, 0) - 1.5) < 1e-13);
  CHECK(std::abs(m.first_moment()(0, 0) - 0.75) < 1e-13);
  CHECK(m.decay_rate() == doctest::Approx(1.0));
}

TEST_CASE("cdf is right continuous at atoms, cdf_left is not") {
  const auto m = fixtures::unit_delay();
  CHECK(m.cdf(0.999)(0, 0) == 0.0);
  CHECK(m.cdf(1.0)(0, 0) == -1.0);
  CHECK(m.cdf_left(1.0)(0, 0) == 0.0);
  CHECK(m.max_atom_location() == 1.0);
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(SignedMatrixMeasure(2, {Atom{-0.5, Mat::Identity(2, 2)}}), InvalidArgument);
  CHECK_THROWS_AS(SignedMatrixMeasure(2, {Atom{0.0, Mat::Identity(3, 3)}}), InvalidArgument);
  MatExpDensity d;
  d.F = Mat::Constant(1, 1, 0.5);
  d.H = Mat::Identity(1, 1);
  d.G = Mat::Identity(1, 1);
  CHECK_THROWS_AS(SignedMatrixMeasure(1, {}, d), InvalidArgument);
  CHECK_THROWS_AS(SignedMatrixMeasure(0, {}), InvalidArgument);
  CHECK_THROWS_AS(SignedMatrixMeasure(1, {}, Density{}, -1.0), InvalidArgument);
}

TEST_CASE("laplace outside the certified half plane throws") {
  const auto m = scalar_exp_density(2.0, 1.0);
  CHECK_THROWS_AS(m.laplace(Complex(-1.5, 0.0)), DomainError);
}

TEST_CASE("sampled density integrates like its samples") {
  SampledDensity sd;
  sd.step = 0.01;
  for (int i = 0; i <= 1000; ++i) sd.values.push_back(Mat::Constant(1, 1, std::exp(-double(i) * 0.01)));
  sd.tail_K = 1.0;
  sd.tail_lambda = 1.0;
  const SignedMatrixMeasure m(1, {}, sd, 0.4);
  CHECK(std::abs(m.density_integral(10.0)(0, 0) - (1.0 - std::exp(-10.0))) < 1e-5);
  CHECK(m.is_matexp() == false);
  CHECK(m.has_density());
}

TEST_CASE("lagrange interpolation is exact for cubics") {
  std::vector<Mat> values;
  auto cubic = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t * t; };
  for (int i = 0; i < 10; ++i) values.push_back(Mat::Constant(1, 1, cubic(0.1 * i)));
  for (double t : {0.05, 0.42, 0.88, 0.95}) {
    CHECK(std::abs(lagrange_interpolate(values, 0.1, 9, t)(0, 0) - cubic(t)) < 1e-13);
  }
}

TEST_CASE("sampled function rejects evaluation past its horizon") {
  const SampledMatrixFunction f(0.5, {Mat::Identity(1, 1), Mat::Identity(1, 1)});
  CHECK(f.horizon() == 0.5);
  CHECK_THROWS_AS(f.linear_at(0.75), GridError);
  CHECK_THROWS_AS(SampledMatrixFunction(0.0, {Mat::Identity(1, 1)}), GridError);
}

TEST_CASE("convolution with a dirac at zero reproduces the kernel") {
  std::vector<Mat> values;
  for (int i = 0; i <= 20; ++i) values.push_back(Mat::Constant(1, 1, std::sin(0.1 * i)));
  const SampledMatrixFunction k(0.1, values);
  const auto m = SignedMatrixMeasure::dirac(Mat::Constant(1, 1, 2.0));
  CHECK(std::abs(m.convolve(k, 1.3)(0, 0) - 2.0 * std::sin(1.3)) < 1e-12);
}

TEST_CASE("pi function of a unit delay") {
  const PiFunction pi(fixtures::unit_delay());
  CHECK(pi(0.5)(0, 0) == doctest::Approx(1.0));
  CHECK(pi(1.5)(0, 0) == doctest::Approx(0.0));
  CHECK(pi.total()(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("exponential moment bounds the weighted total variation") {
  const auto m = scalar_exp_density(2.0, 1.0);
  // int e^{rt} e^{-2t} dt = 1 / (2 - r)
  const double exact = 1.0 / 1.5;
  CHECK(m.exponential_moment(0.5) >= exact);
  CHECK(m.exponential_moment(0.5) <= 1.06 * exact);
  CHECK(SignedMatrixMeasure::dirac(Mat::Constant(1, 1, -2.0), 1.0).exponential_moment(0.3) ==
        doctest::Approx(2.0 * std::exp(0.3)));
  CHECK_THROWS_AS(m.exponential_moment(3.0), DomainError);
}

TEST_CASE("counter stream is a pure function of (seed, stream, counter)") {
  CounterStream a(1, 2, 3), b(1, 2, 3), c(1, 2, 4);
  const double ua = a.uniform();
  CHECK(ua == b.uniform());
  CHECK(ua != c.uniform());
  CHECK(ua > 0.0);
  CHECK(ua < 1.0);
  // Moments of a large normal sample.
  CounterStream s(9, 0, 0);
  double m1 = 0.0, m2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    m1 += x;
    m2 += x * x;
  }
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(std::abs(m2 / n - 1.0) < 0.02);
  CounterStream p(3, 0, 0);
  double pm = 0.0;
  for (int i = 0; i < 20000; ++i) pm += p.poisson(2.5);
  CHECK(std::abs(pm / 20000 - 2.5) < 0.05);
}
