#include <doctest.h>

#include <cmath>

#include "cointegra/errors.hpp"
#include "cointegra/linalg.hpp"
#include "cointegra/winding.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

TEST_CASE("rank factors reproduce the matrix and its complements") {
  const Mat m = mat2(-1.0, 1.0, 0.0, 0.0);
  const auto f = rank_factors(m, 1e-10);
  CHECK(f.rank == 1);
  CHECK(max_abs(Mat(f.alpha * f.beta.transpose() - m)) < 1e-14);
  CHECK(max_abs(Mat(f.alpha_perp.transpose() * f.alpha)) < 1e-14);
  CHECK(max_abs(Mat(f.beta_perp.transpose() * f.beta)) < 1e-14);
}

TEST_CASE("principal angles") {
  Mat a(3, 1), b(3, 1);
  a << 1, 0, 0;
  b << 1, 1, 0;
  CHECK(max_principal_angle(a, b) == doctest::Approx(M_PI / 4));
  CHECK(max_principal_angle(a, 2.0 * a) < 1e-14);
}

TEST_CASE("psd factor") {
  const Mat s = mat2(2.0, 1.0, 1.0, 2.0);
  const Mat l = psd_factor(s);
  CHECK(max_abs(Mat(l * l.transpose() - s)) < 1e-13);
  const Mat singular = mat2(1.0, 1.0, 1.0, 1.0);
  const Mat ls = psd_factor(singular);
  CHECK(max_abs(Mat(ls * ls.transpose() - singular)) < 1e-13);
  CHECK_THROWS_AS(psd_factor(mat2(1.0, 0.0, 0.0, -1.0)), CholeskyError);
}

TEST_CASE("long run matrix and singular brackets") {
  const Mat ap = Mat::Identity(2, 1), bp = Mat::Identity(2, 1);
  const Mat mid = mat2(2.0, 0.0, 0.0, 1.0);
  const Mat c = long_run_matrix(ap, mid, bp, 1e12);
  CHECK(c(0, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(long_run_matrix(ap, Mat::Zero(2, 2), bp, 1e12), SingularError);
}

TEST_CASE("winding numbers count polynomial zeros") {
  auto p = [](Complex z) { return (z - 0.5) * (z + 0.5) * (z - Complex(0.0, 2.0)); };
  CHECK(winding_circle(p, 0.0, 1.0) == 2);
  CHECK(winding_circle(p, 0.0, 3.0) == 3);
  CHECK(winding_polygon(p, {Complex(0.6, -1), Complex(1, -1), Complex(1, 1), Complex(0.6, 1)}) == 0);
  CHECK(winding_polygon(p, {Complex(0.1, -1), Complex(1, -1), Complex(1, 1), Complex(0.1, 1)}) == 1);
  CHECK(winding_polygon(p, {Complex(-1, -1), Complex(1, -1), Complex(1, 3), Complex(-1, 3)}) == 3);
  CHECK_THROWS_AS(winding_circle(p, 0.0, 0.5), ScanResolutionError);
}

TEST_CASE("indented rectangle separates the origin") {
  auto f = [](Complex z) { return z * (z - 1.0) * (z + 3.0); };
  const auto c = count_zeros_indented(f, 0.1, 5.0, 1e-3);
  CHECK(c.outside_origin == 1);
  CHECK(c.at_origin == 1);
}
