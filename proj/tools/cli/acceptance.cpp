#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "config.hpp"
#include "cointegra/csv.hpp"
#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/kernel.hpp"
#include "cointegra/levy.hpp"
#include "cointegra/mcarma.hpp"
#include "cointegra/random.hpp"
#include "cointegra/spectral.hpp"
#include "cointegra/var_oracle.hpp"

namespace cointegra::cli {

using nlohmann::json;

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void write_artifact(const AcceptanceOptions& opts, const std::string& name, const std::string& body) {
  if (opts.artifact_dir.empty()) return;
  std::filesystem::create_directories(opts.artifact_dir);
  std::ofstream out(std::filesystem::path(opts.artifact_dir) / name, std::ios::binary);
  out << body;
}

Mat closed_c_tilde(bool cointegrated, double t) {
  const double e = std::exp(-t);
  Mat m(2, 2);
  if (cointegrated) {
    m << e, 1.0 - e, 0.0, 1.0;
  } else {
    m << e, 0.0, 0.0, e;
  }
  return m;
}

Mat closed_c(bool cointegrated, double t) {
  const double e = std::exp(-t);
  Mat m(2, 2);
  if (cointegrated) {
    m << e, -e, 0.0, 0.0;
  } else {
    m << e, 0.0, 0.0, e;
  }
  return m;
}

// f equals C for both OU fixtures.
double kernel_error(const KernelGrid& k, bool cointegrated) {
  double err = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double t = k.time(i);
    const Mat c = closed_c(cointegrated, t);
    err = std::max({err, max_abs(k.c_tilde[i] - closed_c_tilde(cointegrated, t)), max_abs(k.c[i] - c),
                    max_abs(k.f[i] - c)});
  }
  return err;
}

CriterionResult criterion1() {
  CriterionResult r;
  r.id = 1;
  r.name = "cointegrated OU structure";
  const auto m = fixtures::ou_cointegrated();
  const CharacteristicFunction cf(m);
  const auto rep = check_conditions(cf);
  const auto st = cointegration_structure(cf);
  const Mat numeric = c0_residue_numeric(cf);
  Mat expected(2, 2);
  expected << 0.0, 1.0, 0.0, 1.0;
  const double e_formula = max_abs(st.c0 - expected);
  const double e_residue = max_abs(numeric - expected);
  r.metrics = {{"verdict", to_string(rep.verdict)}, {"rank", st.rank}, {"c0_formula_error", e_formula},
               {"c0_residue_error", e_residue}};
  r.pass = rep.verdict == Verdict::Cointegrated && st.rank == 1 && e_formula <= 1e-8 && e_residue <= 1e-8;
  r.detail = "verdict " + to_string(rep.verdict) + ", r = " + std::to_string(st.rank) + ", C0 errors " +
             fmt(e_formula) + " / " + fmt(e_residue);
  r.limit_seconds = 1.0;
  return r;
}

CriterionResult criterion2(const AcceptanceOptions& opts) {
  CriterionResult r;
  r.id = 2;
  r.name = "kernel accuracy";
  r.limit_seconds = 10.0;
  bool pass = true;
  std::string detail;
  for (const bool coint : {false, true}) {
    const auto m = coint ? fixtures::ou_cointegrated() : fixtures::ou_stationary();
    const auto st = cointegration_structure(CharacteristicFunction(m));
    const auto fine = solve_kernel(m, st, 1e-3, 10.0);
    const double err = kernel_error(fine, coint);
    const double err_half = kernel_error(solve_kernel(m, st, 5e-4, 10.0), coint);
    // Order check where the RK4 error is above round-off.
    const double coarse = kernel_error(solve_kernel(m, st, 0.1, 10.0), coint);
    const double coarse_half = kernel_error(solve_kernel(m, st, 0.05, 10.0), coint);
    const double ratio = coarse / coarse_half;
    const std::string label = coint ? "ou_cointegrated" : "ou_stationary";
    r.metrics[label] = {{"max_error_dt_1e-3", err},     {"max_error_dt_5e-4", err_half},
                        {"max_error_dt_0.1", coarse},   {"max_error_dt_0.05", coarse_half},
                        {"halving_ratio", ratio}};
    pass = pass && err <= 1e-6 && ratio >= 8.0;
    detail += label + ": error " + fmt(err) + ", halving ratio " + fmt(ratio) + "; ";
    if (coint) {
      std::ostringstream csv;
      write_kernel_csv(csv, fine, 100);
      write_artifact(opts, "kernel_ou_cointegrated.csv", csv.str());
    }
  }
  r.pass = pass;
  r.detail = detail.substr(0, detail.size() - 2);
  return r;
}

CriterionResult criterion3() {
  CriterionResult r;
  r.id = 3;
  r.name = "Laplace identities";
  r.limit_seconds = 10.0;
  const std::vector<Complex> z{0.5, 1.0, 2.0, Complex(1.0, 3.0)};
  const std::vector<std::pair<std::string, SignedMatrixMeasure>> models{
      {"ou_stationary", fixtures::ou_stationary()},
      {"ou_cointegrated", fixtures::ou_cointegrated()},
      {"mcarma_bivariate", msdde_from_mcarma(fixtures::mcarma_bivariate())}};
  double worst = 0.0;
  for (const auto& [label, m] : models) {
    const CharacteristicFunction cf(m);
    const auto st = cointegration_structure(cf);
    const auto k = solve_kernel(m, st, 1e-3, truncation_horizon(m, 1e-8));
    const auto rep = laplace_check(k, cf, z, 1e-5);
    r.metrics[label] = {{"max_deviation_f", rep.max_deviation_f}, {"max_deviation_c", rep.max_deviation_c},
                        {"horizon", k.horizon}};
    worst = std::max({worst, rep.max_deviation_f, rep.max_deviation_c});
  }
  // The bridged measure must also reproduce h^{-1} = P^{-1} Q.
  const auto spec = fixtures::mcarma_bivariate();
  const CharacteristicFunction cf(msdde_from_mcarma(spec));
  double algebra = 0.0;
  for (const auto zz : z) {
    algebra = std::max(algebra, (cf(zz).inverse() - transfer_fn(spec, zz)).cwiseAbs().maxCoeff());
  }
  r.metrics["mcarma_bivariate"]["h_inverse_vs_transfer"] = algebra;
  r.pass = worst <= 1e-5 && algebra <= 1e-8;
  r.detail = "max deviation " + fmt(worst) + " (tol 1e-05)";
  return r;
}

CriterionResult criterion4() {
  CriterionResult r;
  r.id = 4;
  r.name = "C0 = I - int f";
  const std::vector<std::pair<std::string, SignedMatrixMeasure>> models{
      {"ou_stationary", fixtures::ou_stationary()},
      {"ou_cointegrated", fixtures::ou_cointegrated()},
      {"zero", fixtures::zero_measure(2)},
      {"unit_delay", fixtures::unit_delay()},
      {"mcarma_p1", msdde_from_mcarma(fixtures::mcarma_p1())},
      {"mcarma_bivariate", msdde_from_mcarma(fixtures::mcarma_bivariate())},
      {"mcarma_random", msdde_from_mcarma(fixtures::mcarma_random())}};
  double worst = 0.0;
  for (const auto& [label, m] : models) {
    const auto st = cointegration_structure(CharacteristicFunction(m));
    const double step = std::min(1e-3, default_step(m));
    const auto k = solve_kernel(m, st, step, truncation_horizon(m, 1e-8));
    const int n = m.dim();
    const double dev = max_abs(Mat::Identity(n, n) - integrate_f(k) - st.c0);
    r.metrics[label] = {{"deviation", dev}, {"tail_bound", k.truncation_error_bound}, {"horizon", k.horizon}};
    worst = std::max(worst, dev);
  }
  r.pass = worst <= 1e-6;
  r.detail = "max deviation " + fmt(worst) + " over " + std::to_string(models.size()) + " fixtures";
  return r;
}

double ecf_rms(const SolutionPath& path, const SignedMatrixMeasure& m, const std::vector<std::pair<long, long>>& pairs) {
  const auto res = ecf_residuals(path, m, pairs);
  double acc = 0.0;
  for (const auto& v : res) acc += v.squaredNorm();
  return std::sqrt(acc / double(res.size()));
}

CriterionResult criterion5() {
  CriterionResult r;
  r.id = 5;
  r.name = "ECF residual order";
  r.limit_seconds = 30.0;
  const double dt = 0.01;
  const double horizon = 20.0;
  bool pass = true;
  std::string detail;
  for (const bool coint : {false, true}) {
    const auto m = coint ? fixtures::ou_cointegrated() : fixtures::ou_stationary();
    const auto st = cointegration_structure(CharacteristicFunction(m));
    const auto fine_incr = sample_levy(fixtures::brownian(2), dt / 2.0, horizon, horizon, 5);
    const auto coarse_incr = fine_incr.coarsen(2);
    const auto fine = granger_path(solve_kernel(m, st, dt / 2.0, horizon), st, fine_incr, Vec::Zero(2));
    const auto coarse = granger_path(solve_kernel(m, st, dt, horizon), st, coarse_incr, Vec::Zero(2));
    CounterStream rng(11, 0, 0);
    std::vector<std::pair<long, long>> pc, pf;
    for (int i = 0; i < 100; ++i) {
      const double s = rng.uniform() * (horizon - 2.0);
      const double t = s + 0.1 + rng.uniform() * (horizon - s - 0.2);
      const long sc = std::lround(s / dt);
      const long tc = std::lround(t / dt);
      pc.emplace_back(sc, tc);
      pf.emplace_back(2 * sc, 2 * tc);
    }
    const double rms = ecf_rms(coarse, m, pc);
    const double rms_half = ecf_rms(fine, m, pf);
    const double ratio = rms_half / rms;
    const std::string label = coint ? "ou_cointegrated" : "ou_stationary";
    r.metrics[label] = {{"rms_dt", rms}, {"rms_half_dt", rms_half}, {"ratio", ratio}};
    pass = pass && ratio <= 0.6;
    detail += label + " ratio " + fmt(ratio) + "; ";
  }
  r.pass = pass;
  r.detail = detail.substr(0, detail.size() - 2);
  return r;
}

CriterionResult criterion6(const AcceptanceOptions& opts) {
  CriterionResult r;
  r.id = 6;
  r.name = "variance dichotomy";
  r.limit_seconds = 120.0;
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const double dt = 0.02;
  const auto kernel = solve_kernel(m, st, dt, truncation_horizon(m, 1e-8));
  EnsembleSpec spec;
  spec.step = dt;
  spec.t_max = 50.0;
  spec.paths = 500;
  spec.seed = 20240611;
  const auto model = fixtures::brownian(2);
  const auto paths = simulate_ensemble(model, kernel, st, Vec::Zero(2), spec, opts.threads);
  Vec g1(2), g2(2);
  g1 << 0.0, 1.0;
  g2 << -1.0, 1.0;
  const auto v1 = variance_profile(paths, g1);
  const auto v2 = variance_profile(paths, g2);
  const double expected = g1.dot(st.c0 * model.second_moment() * st.c0.transpose() * g1);
  const double rel = std::abs(v1.slope / expected - 1.0);
  r.metrics = {{"slope_random_walk_direction", v1.slope}, {"expected_slope", expected}, {"relative_error", rel},
               {"slope_cointegrating_direction", v2.slope}};
  r.pass = rel <= 0.15 && v2.slope <= 0.05;
  r.detail = "slope (0,1): " + fmt(v1.slope) + " vs " + fmt(expected) + ", slope (-1,1): " + fmt(v2.slope);
  std::ostringstream csv;
  write_variance_csv(csv, {{"gamma_0_1", v1}, {"gamma_m1_1", v2}}, 5);
  write_artifact(opts, "variance_ou_cointegrated.csv", csv.str());
  return r;
}

CriterionResult criterion7() {
  CriterionResult r;
  r.id = 7;
  r.name = "xi-increment invariance";
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.01, 20.0);
  const auto incr = sample_levy(fixtures::brownian(2), 0.01, 20.0, 20.0, 99);
  Vec xi(2);
  xi << 3.0, 3.0;
  const auto a = granger_path(kernel, st, incr, Vec::Zero(2));
  const auto b = granger_path(kernel, st, incr, xi);
  double dev = 0.0, scale = 0.0;
  for (long c = 0; c < a.x.cols(); ++c) {
    dev = std::max(dev, (b.x.col(c) - a.x.col(c) - xi).cwiseAbs().maxCoeff());
    scale = std::max(scale, b.x.col(c).cwiseAbs().maxCoeff());
  }
  r.metrics = {{"max_deviation", dev}, {"grid_points", a.x.cols()}};
  r.pass = dev <= 1e-13 * (1.0 + scale);
  r.detail = "max |X_xi - X_0 - xi| = " + fmt(dev) + " over " + std::to_string(a.x.cols()) + " grid points";
  return r;
}

CriterionResult criterion8(const AcceptanceOptions& opts) {
  CriterionResult r;
  r.id = 8;
  r.name = "VAR closed forms";
  r.limit_seconds = 1.0;
  const auto biv = var_granger(fixtures::var_bivariate());
  Mat c0(2, 2), c_first(2, 2);
  c0 << 0.5, 0.5, 0.5, 0.5;
  c_first << 0.5, -0.5, -0.5, 0.5;
  double later = 0.0;
  for (std::size_t j = 1; j < biv.c.size(); ++j) later = std::max(later, max_abs(biv.c[j]));
  const double e_biv = std::max({max_abs(biv.c0 - c0), max_abs(biv.c[0] - c_first), later});

  const auto rw = var_granger(fixtures::var_random_walk());
  double e_rw = std::abs(rw.c0(0, 0) - 1.0);
  for (const auto& c : rw.c) e_rw = std::max(e_rw, std::abs(c(0, 0)));

  const auto ar = var_granger(fixtures::var_ar1());
  double e_ar = std::abs(ar.c0(0, 0));
  for (std::size_t j = 0; j < ar.c.size(); ++j) e_ar = std::max(e_ar, std::abs(ar.c[j](0, 0) - std::pow(0.5, double(j))));

  r.metrics = {{"bivariate_error", e_biv}, {"random_walk_error", e_rw}, {"ar1_error", e_ar},
               {"bivariate_rank", biv.rank}, {"ar1_terms", ar.c.size()}};
  r.pass = e_biv <= 1e-10 && e_rw <= 1e-10 && e_ar <= 1e-10 && biv.rank == 1;
  r.detail = "errors " + fmt(e_biv) + " (bivariate), " + fmt(e_rw) + " (random walk), " + fmt(e_ar) + " (AR(1))";
  std::ostringstream csv;
  write_granger_csv(csv, biv);
  write_artifact(opts, "granger_var_bivariate.csv", csv.str());
  return r;
}

CriterionResult criterion9(const AcceptanceOptions& opts) {
  CriterionResult r;
  r.id = 9;
  r.name = "MCARMA bridge";
  r.limit_seconds = 10.0;
  const auto p1 = fixtures::mcarma_p1();
  const auto biv = fixtures::mcarma_bivariate();
  const auto rnd = fixtures::mcarma_random();
  double fourier = 0.0;
  for (const auto* s : {&p1, &biv, &rnd}) fourier = std::max(fourier, fourier_identity_error(*s, msdde_from_mcarma(*s), 64));

  auto c0_gap = [](const MCARMASpec& s) {
    const auto st = cointegration_structure(CharacteristicFunction(msdde_from_mcarma(s)));
    return max_abs(carma_c0(s) - st.c0);
  };
  const double gap_p1 = c0_gap(p1);
  const double gap_rnd = c0_gap(rnd);

  const auto bridged = msdde_from_mcarma(p1);
  const bool exact = !bridged.has_density() && bridged.atoms().size() == 1 && bridged.atoms()[0].location == 0.0 &&
                     bridged.atoms()[0].weight == fixtures::ou_cointegrated_matrix() &&
                     bridged.atoms()[0].weight == Mat(-p1.P[0]);
  r.metrics = {{"fourier_max_error", fourier}, {"c0_gap_p1", gap_p1}, {"c0_gap_random", gap_rnd},
               {"p1_reproduces_ou", exact}, {"random_spec_P", {matrix_to_json(rnd.P[0]), matrix_to_json(rnd.P[1])}},
               {"random_spec_Q", {matrix_to_json(rnd.Q[0])}}};
  r.pass = fourier <= 1e-8 && gap_p1 <= 1e-8 && gap_rnd <= 1e-8 && exact;
  r.detail = "Fourier " + fmt(fourier) + ", C0 gaps " + fmt(gap_p1) + " / " + fmt(gap_rnd) +
             (exact ? ", p = 1 bridge exact" : ", p = 1 bridge NOT exact");
  write_artifact(opts, "bridged_mcarma_bivariate.json", json{{"model", measure_to_json(msdde_from_mcarma(biv))}}.dump(2) + "\n");
  return r;
}

CriterionResult criterion10() {
  CriterionResult r;
  r.id = 10;
  r.name = "discretization bridge";
  r.limit_seconds = 30.0;
  const auto ou = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(ou));
  const auto disc = var_granger(discretization_bridge(ou, 1e-2, 1));
  const double angle = max_principal_angle(disc.beta, st.beta);

  const auto delay = fixtures::unit_delay();
  const auto a = match_roots(discretization_bridge(delay, 1e-2, 101), delay, 1e-2, 5);
  const auto b = match_roots(discretization_bridge(delay, 5e-3, 201), delay, 5e-3, 5);
  bool order_ok = a.size() == 5 && b.size() == 5;
  json roots = json::array();
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const double ratio = b[i].deviation / a[i].deviation;
    const bool same_root = std::abs(a[i].continuous - b[i].continuous) <= 1e-8;
    order_ok = order_ok && same_root && ratio >= 0.2 && ratio <= 0.3;
    worst_ratio = std::max(worst_ratio, ratio);
    roots.push_back({{"continuous", {a[i].continuous.real(), a[i].continuous.imag()}},
                     {"deviation_dt", a[i].deviation}, {"deviation_half_dt", b[i].deviation}, {"ratio", ratio}});
  }
  r.metrics = {{"principal_angle", angle}, {"roots", roots}};
  r.pass = angle <= 1e-8 && order_ok;
  r.detail = "principal angle " + fmt(angle) + ", worst root deviation ratio " + fmt(worst_ratio) + " (O(dt^2) gives 0.25)";
  return r;
}

// Light artifact bundle regenerated twice with different worker counts.
std::string determinism_bundle(unsigned threads) {
  std::ostringstream out;
  const auto m = fixtures::ou_cointegrated();
  const CharacteristicFunction cf(m);
  const auto st = cointegration_structure(cf);
  const auto kernel = solve_kernel(m, st, 0.01, 20.0);
  write_kernel_csv(out, kernel, 10);
  EnsembleSpec spec;
  spec.step = 0.01;
  spec.t_max = 5.0;
  spec.paths = 16;
  spec.seed = 77;
  write_paths_csv(out, simulate_ensemble(fixtures::brownian(2), kernel, st, Vec::Zero(2), spec, threads), 25);
  write_granger_csv(out, var_granger(fixtures::var_bivariate()));
  out << json{{"model", measure_to_json(msdde_from_mcarma(fixtures::mcarma_random()))}}.dump() << '\n';
  const auto rep = check_conditions(cf);
  out << to_string(rep.verdict) << ' ' << rep.zero_count_right_halfplane << '\n';
  return out.str();
}

CriterionResult criterion11(const AcceptanceOptions& opts) {
  CriterionResult r;
  r.id = 11;
  r.name = "determinism";
  const std::string a = determinism_bundle(1);
  const std::string b = determinism_bundle(std::max(2u, opts.threads));
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : a) hash = (hash ^ c) * 1099511628211ULL;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  r.metrics = {{"bundle_bytes", a.size()}, {"fnv1a64", hex}};
  r.pass = a == b;
  r.detail = std::string(r.pass ? "identical" : "different") + " artifact bundles across runs and worker counts";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  const std::vector<std::pair<int, std::function<CriterionResult()>>> table{
      {1, [] { return criterion1(); }},
      {2, [&] { return criterion2(opts); }},
      {3, [] { return criterion3(); }},
      {4, [] { return criterion4(); }},
      {5, [] { return criterion5(); }},
      {6, [&] { return criterion6(opts); }},
      {7, [] { return criterion7(); }},
      {8, [&] { return criterion8(opts); }},
      {9, [&] { return criterion9(opts); }},
      {10, [] { return criterion10(); }},
      {11, [&] { return criterion11(opts); }},
  };
  std::vector<CriterionResult> out;
  for (const auto& [id, fn] : table) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.id = id;
      res.name = "criterion " + std::to_string(id);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.limit_seconds > 0.0 && res.seconds > res.limit_seconds) {
      res.pass = false;
      res.detail += "; runtime limit exceeded";
    }
    out.push_back(std::move(res));
  }
  return out;
}

json acceptance_report(const std::vector<CriterionResult>& results) {
  json list = json::array();
  bool all = true;
  for (const auto& r : results) {
    list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"metrics", r.metrics}});
    all = all && r.pass;
  }
  return {{"criteria", list}, {"all_pass", all}};
}

std::string format_line(const CriterionResult& r, bool with_time) {
  std::string line = "criterion " + std::to_string(r.id) + " [" + r.name + "]: " + (r.pass ? "PASS" : "FAIL") +
                     " (" + r.detail + ")";
  if (with_time) {
    line += " in " + fmt(r.seconds) + " s";
    if (r.limit_seconds > 0.0) line += " (limit " + fmt(r.limit_seconds) + " s)";
  }
  return line;
}

}  // namespace cointegra::cli
