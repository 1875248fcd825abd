#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/levy.hpp"
#include "helpers.hpp"

using namespace cointegra;
using testing::mat2;
using testing::max_abs;

namespace {

LevyModel discrete_jumps() {
  LevyModel m = fixtures::brownian(2);
  m.drift << 0.1, -0.2;
  JumpSpec j;
  j.kind = JumpSpec::Kind::Discrete;
  j.rate = 2.0;
  Vec a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, -1.0;
  j.values = {a, b};
  j.probabilities = {0.25, 0.75};
  m.jumps = j;
  return m;
}

}  // namespace

TEST_CASE("increments are reproducible per (seed, stream)") {
  const auto model = fixtures::brownian(2);
  const auto a = sample_levy(model, 0.01, 1.0, 2.0, 42, 3);
  const auto b = sample_levy(model, 0.01, 1.0, 2.0, 42, 3);
  const auto c = sample_levy(model, 0.01, 1.0, 2.0, 42, 4);
  REQUIRE(a.count() == 300);
  CHECK(a.first_index() == -99);
  CHECK(a.last_index() == 200);
  bool same = true, differ = false;
  for (long k = a.first_index(); k <= a.last_index(); ++k) {
    same = same && a.increment(k) == b.increment(k);
    differ = differ || a.increment(k) != c.increment(k);
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("brownian increments have variance dt") {
  const auto g = sample_levy(fixtures::brownian(1), 0.01, 0.0, 2000.0, 1);
  double m1 = 0.0, m2 = 0.0;
  for (long k = g.first_index(); k <= g.last_index(); ++k) {
    m1 += g.increment(k)(0);
    m2 += g.increment(k)(0) * g.increment(k)(0);
  }
  const double n = double(g.count());
  CHECK(std::abs(m1 / n) < 4.0 * std::sqrt(0.01 / n));
  CHECK(std::abs(m2 / n / 0.01 - 1.0) < 0.03);
}

TEST_CASE("jump model moments") {
  const auto model = discrete_jumps();
  const Mat second = model.second_moment();
  // I + 2 (0.25 e1 e1^T + 0.75 e2 e2^T)
  CHECK(max_abs(second - mat2(1.5, 0.0, 0.0, 2.5)) < 1e-14);
  const auto g = sample_levy(model, 0.05, 0.0, 4000.0, 8);
  Vec mean = Vec::Zero(2);
  for (long k = g.first_index(); k <= g.last_index(); ++k) mean += g.increment(k);
  mean /= 4000.0;
  // drift + rate E[J] = (0.1 + 0.5, -0.2 - 1.5)
  CHECK(std::abs(mean(0) - 0.6) < 0.1);
  CHECK(std::abs(mean(1) + 1.7) < 0.1);
}

TEST_CASE("Levy model validation") {
  auto bad = discrete_jumps();
  bad.jumps->probabilities = {0.5, 0.4};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  auto neg = fixtures::brownian(2);
  neg.gaussian_cov = mat2(1.0, 0.0, 0.0, -1.0);
  CHECK_THROWS_AS(neg.validate(), CholeskyError);
  auto shape = fixtures::brownian(2);
  shape.drift = Vec::Zero(3);
  CHECK_THROWS_AS(shape.validate(), InvalidArgument);
}

TEST_CASE("coarsening sums blocks and preserves Z") {
  const auto fine = sample_levy(fixtures::brownian(2), 0.005, 1.0, 2.0, 5);
  const auto coarse = fine.coarsen(2);
  CHECK(coarse.step() == doctest::Approx(0.01));
  CHECK(coarse.count() * 2 == fine.count());
  CHECK(max_abs(coarse.increment(7) - fine.increment(13) - fine.increment(14)) < 1e-15);
  CHECK(max_abs(coarse.z_at(50) - fine.z_at(100)) < 1e-13);
  CHECK(max_abs(coarse.z_at(-50) - fine.z_at(-100)) < 1e-13);
  CHECK(max_abs(fine.z_at(0)) == 0.0);
  const auto sum = fine.combine(2.0, fine, -1.0);
  CHECK(max_abs(sum.increment(3) - fine.increment(3)) < 1e-15);
  CHECK_THROWS_AS(fine.z_at(1000), WindowError);
}

TEST_CASE("stationary OU path matches the exact AR(1) recursion") {
  // X_m = sum_{k <= m} e^{-(m-k) dt} dZ_k satisfies X_m = e^{-dt} X_{m-1} + dZ_m.
  const auto m = fixtures::ou_stationary();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const double dt = 0.01;
  const auto kernel = solve_kernel(m, st, dt, 30.0);
  const auto incr = sample_levy(fixtures::brownian(2), dt, 30.0, 5.0, 17);
  const auto path = granger_path(kernel, st, incr, Vec::Zero(2));
  Vec x = Vec::Zero(2);
  double err = 0.0;
  for (long k = incr.first_index(); k <= incr.last_index(); ++k) {
    x = std::exp(-dt) * x + incr.increment(k);
    if (k >= path.first_index()) err = std::max(err, (path.at(k) - x).cwiseAbs().maxCoeff());
  }
  CHECK(path.first_index() <= 0);
  CHECK(err < 1e-9);
}

TEST_CASE("cointegrated path: beta^T X is stationary and X - xi is xi free") {
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.01, 20.0);
  const auto incr = sample_levy(fixtures::brownian(2), 0.01, 20.0, 20.0, 3);
  Vec xi(2);
  xi << 2.0, 2.0;
  const auto a = granger_path(kernel, st, incr, Vec::Zero(2));
  const auto b = granger_path(kernel, st, incr, xi);
  CHECK(max_abs(b.x - a.x - xi.replicate(1, a.x.cols())) < 1e-13);
  // Second coordinate is the random walk Z_2 (C_0 row).
  CHECK(std::abs(a.at(1000)(1) - incr.z_at(1000)(1)) < 1e-12);
  Vec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(granger_path(kernel, st, incr, bad), XiError);
  CHECK(max_abs(st.pi0 * project_xi(st, bad)) < 1e-14);
  CHECK(max_abs(st.pi0 * random_xi(st, 1.0, 4, 0)) < 1e-14);
}

TEST_CASE("granger path needs enough burn-in") {
  const auto m = fixtures::ou_stationary();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.01, 10.0);
  const auto incr = sample_levy(fixtures::brownian(2), 0.01, 5.0, 5.0, 3);
  CHECK_THROWS_AS(granger_path(kernel, st, incr, Vec::Zero(2)), WindowError);
}

TEST_CASE("ECF residuals are first order in dt") {
  const auto m = fixtures::unit_delay();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto fine_incr = sample_levy(fixtures::brownian(1), 0.005, 60.0, 10.0, 21);
  const auto coarse_incr = fine_incr.coarsen(2);
  const auto fine = granger_path(solve_kernel(m, st, 0.005, 60.0), st, fine_incr, Vec::Zero(1));
  const auto coarse = granger_path(solve_kernel(m, st, 0.01, 60.0), st, coarse_incr, Vec::Zero(1));
  std::vector<std::pair<long, long>> pc, pf;
  for (long s = 200; s < 900; s += 70) {
    pc.emplace_back(s, s + 95);
    pf.emplace_back(2 * s, 2 * s + 190);
  }
  double a = 0.0, b = 0.0;
  for (const auto& r : ecf_residuals(coarse, m, pc)) a += r.squaredNorm();
  for (const auto& r : ecf_residuals(fine, m, pf)) b += r.squaredNorm();
  CHECK(std::sqrt(b / a) < 0.6);
  CHECK_THROWS_AS(ecf_residual(coarse, m, 50, 40), InvalidArgument);
}

TEST_CASE("ensembles do not depend on the worker count") {
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.02, 15.0);
  EnsembleSpec spec;
  spec.step = 0.02;
  spec.t_max = 4.0;
  spec.paths = 6;
  spec.seed = 99;
  const auto a = simulate_ensemble(fixtures::brownian(2), kernel, st, Vec::Zero(2), spec, 1);
  const auto b = simulate_ensemble(fixtures::brownian(2), kernel, st, Vec::Zero(2), spec, 3);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first_index() == 0);
    CHECK(a[i].x == b[i].x);
  }
  CHECK(a[0].x != a[1].x);
}

TEST_CASE("random walk variance grows like t") {
  const auto m = fixtures::zero_measure(1);
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.05, 0.0);
  EnsembleSpec spec;
  spec.step = 0.05;
  spec.t_max = 10.0;
  spec.paths = 400;
  spec.seed = 1;
  const auto paths = simulate_ensemble(fixtures::brownian(1), kernel, st, Vec::Zero(1), spec);
  const auto prof = variance_profile(paths, Vec::Ones(1));
  CHECK(prof.variance.front() == 0.0);
  CHECK(std::abs(prof.slope - 1.0) < 0.2);
  CHECK_THROWS_AS(variance_profile({paths[0]}, Vec::Ones(1)), InvalidArgument);
}

TEST_CASE("thread limit follows the environment") {
  setenv("COINTEGRA_THREADS", "3", 1);
  CHECK(thread_limit() == 3);
  unsetenv("COINTEGRA_THREADS");
  CHECK(thread_limit() >= 1);
}
