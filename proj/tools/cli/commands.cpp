#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acceptance.hpp"
#include "config.hpp"
#include "cointegra/csv.hpp"
#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"
#include "cointegra/kernel.hpp"
#include "cointegra/levy.hpp"
#include "cointegra/linalg.hpp"
#include "cointegra/random.hpp"

namespace cointegra::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Bound on the pi tail dropped from the ECF residual window; well below the
// O(dt) discretization residual.
constexpr double kPiTail = 1e-8;

/// Numerical check that did not meet its tolerance.
struct VerificationFailure {
  std::string what;
};

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// Text form of a flat report: one "key: value" line per leaf.
void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& item : j.items()) flatten(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), os);
  } else {
    os << prefix << ": " << j.dump() << '\n';
  }
}

class Runner {
 public:
  Runner(const Options& opts, std::ostream& out) : opts_(opts), out_(out), dir_(opts.out) {}

  void load() { cfg_ = load_config(opts_.config); }

  int analyze() {
    const auto m = measure("analyze");
    const CharacteristicFunction cf(m);
    const auto rep = check_conditions(cf, cfg_.analysis.scan, cfg_.analysis.rank_tol);
    const auto st = cointegration_structure(cf, cfg_.analysis.rank_tol);
    json report{{"condition_report", condition_json(rep)}, {"structure", structure_json(st)}};
    if (rep.verdict == Verdict::Cointegrated) {
      try {
        report["c0_residue"] = matrix_to_json(c0_residue_numeric(cf));
      } catch (const DivergenceError& e) {
        report["c0_residue_error"] = e.what();
      }
    }
    emit("analyze", report);
    return kOk;
  }

  int kernel() {
    const auto m = measure("kernel");
    const CharacteristicFunction cf(m);
    const auto st = cointegration_structure(cf, cfg_.analysis.rank_tol);
    const double step = cfg_.kernel.step.value_or(default_step(m));
    const double horizon = cfg_.kernel.horizon.value_or(truncation_horizon(m, cfg_.kernel.truncation_target));
    const auto k = solve_kernel(m, st, step, horizon);
    std::ostringstream csv;
    write_kernel_csv(csv, k, cfg_.kernel.output_stride);
    write_file(dir_ / "kernel.csv", csv.str());

    const double tol = opts_.tol.value_or(cfg_.kernel.tol);
    const auto lap = laplace_check(k, cf, cfg_.kernel.z_samples, tol);
    json entries = json::array();
    for (const auto& e : lap.entries) {
      entries.push_back({{"z", complex_json(e.z)}, {"deviation_f", e.deviation_f}, {"deviation_c", e.deviation_c}});
    }
    const int n = m.dim();
    const double c0_dev = (Mat::Identity(n, n) - integrate_f(k) - st.c0).cwiseAbs().maxCoeff();
    json report{{"step", step},
                {"horizon", k.horizon},
                {"truncation_error_bound", k.truncation_error_bound},
                {"entries", entries},
                {"max_deviation_f", lap.max_deviation_f},
                {"max_deviation_c", lap.max_deviation_c},
                {"tol", tol},
                {"pass", lap.pass},
                {"c0_quadrature_deviation", c0_dev}};
    emit("laplace_report", report);
    if (!lap.pass) throw VerificationFailure{"Laplace identity deviation exceeds " + format_number(tol)};
    return kOk;
  }

  int simulate() {
    const auto m = measure("simulate");
    const auto& sim = cfg_.simulation;
    const auto seed = opts_.seed ? opts_.seed : sim.seed;
    if (!seed) throw ConfigError("simulation.seed: missing required field (or pass --seed)");
    const CharacteristicFunction cf(m);
    const auto st = cointegration_structure(cf, cfg_.analysis.rank_tol);
    const double horizon = cfg_.kernel.horizon.value_or(truncation_horizon(m, cfg_.kernel.truncation_target));
    const auto kernel = solve_kernel(m, st, sim.step, horizon);
    const LevyModel levy = sim.levy.value_or(fixtures::brownian(m.dim()));
    const Vec xi = sim.xi.value_or(Vec::Zero(m.dim()));
    if (xi.size() != m.dim()) throw ConfigError("simulation.xi: expected " + std::to_string(m.dim()) + " entries");

    EnsembleSpec spec;
    spec.step = sim.step;
    spec.t_max = sim.horizon;
    spec.t_burn = sim.burn_in.value_or(0.0);
    spec.paths = sim.paths;
    spec.seed = *seed;
    std::vector<SolutionPath> paths;
    try {
      paths = simulate_ensemble(levy, kernel, st, xi, spec);
    } catch (const XiError& e) {
      throw ConfigError(std::string("simulation.xi: ") + e.what());
    }

    std::ostringstream pcsv;
    const std::vector<SolutionPath> shown(paths.begin(), paths.begin() + long(std::min(paths.size(), sim.paths_written)));
    write_paths_csv(pcsv, shown, sim.output_stride);
    write_file(dir_ / "paths.csv", pcsv.str());

    auto directions = sim.directions;
    if (directions.empty()) {
      for (int i = 0; i < m.dim(); ++i) directions.emplace_back("e" + std::to_string(i + 1), Vec::Unit(m.dim(), i));
    }
    std::vector<std::pair<std::string, VarianceProfile>> profiles;
    json slopes = json::object();
    const Mat sigma = levy.second_moment();
    for (const auto& [label, gamma] : directions) {
      if (gamma.size() != m.dim()) throw ConfigError("simulation.directions." + label + ": wrong length");
      profiles.emplace_back(label, variance_profile(paths, gamma));
      slopes[label] = {{"fitted", profiles.back().second.slope},
                       {"predicted", gamma.dot(st.c0 * sigma * st.c0.transpose() * gamma)}};
    }
    std::ostringstream vcsv;
    write_variance_csv(vcsv, profiles, sim.output_stride);
    write_file(dir_ / "variance.csv", vcsv.str());
    write_file(dir_ / "variance.gp", gnuplot_script(profiles));

    emit("ecf_report", ecf_report(paths.front(), m, *seed, sim.ecf_pairs, slopes));
    return kOk;
  }

  int mcarma() {
    if (cfg_.model.kind != ModelConfig::Kind::Mcarma) throw ConfigError("model.type: mcarma needs an mcarma model");
    const auto& spec = *cfg_.model.mcarma;
    const double tol = opts_.tol.value_or(cfg_.mcarma.tol);
    const auto bridged = msdde_from_mcarma(spec);
    write_json(dir_ / "bridged_measure.json", json{{"model", measure_to_json(bridged)}});
    const auto cond = check_cointegrated_conditions(spec, cfg_.analysis.rank_tol);
    json report{{"conditions",
                 {{"zeros_p", cond.zeros_p},
                  {"rank_in_range", cond.rank_in_range},
                  {"bracket_invertible", cond.bracket_invertible},
                  {"zeros_q", cond.zeros_q},
                  {"stationary", cond.stationary},
                  {"rank", cond.rank},
                  {"bracket_condition", cond.bracket_condition},
                  {"notes", cond.notes}}},
                {"fourier_identity_error", fourier_identity_error(spec, bridged, 64)},
                {"tol", tol}};
    if (!cond.all_pass()) {
      report["pass"] = false;
      emit("c0_report", report);
      throw VerificationFailure{"MCARMA cointegration conditions do not hold"};
    }
    const Mat direct = carma_c0(spec, cfg_.analysis.rank_tol);
    const Mat spectral = cointegration_structure(CharacteristicFunction(bridged), cfg_.analysis.rank_tol).c0;
    const double dev = (direct - spectral).cwiseAbs().maxCoeff();
    report["c0_mcarma"] = matrix_to_json(direct);
    report["c0_spectral"] = matrix_to_json(spectral);
    report["c0_deviation"] = dev;
    report["pass"] = dev <= tol;
    emit("c0_report", report);
    if (dev > tol) throw VerificationFailure{"C0 routes differ by " + format_number(dev)};
    return kOk;
  }

  int var_oracle() {
    if (cfg_.model.kind != ModelConfig::Kind::Var) throw ConfigError("model.type: var-oracle needs a var model");
    const auto& spec = *cfg_.model.var;
    const auto seed = opts_.seed ? opts_.seed : cfg_.var.seed;
    if (!seed) throw ConfigError("var.seed: missing required field (or pass --seed)");
    const auto rep = var_granger(spec, opts_.tol.value_or(cfg_.var.tol));
    std::ostringstream csv;
    write_granger_csv(csv, rep);
    write_file(dir_ / "granger.csv", csv.str());
    const Vec xi = cfg_.var.xi.value_or(Vec::Zero(spec.dim));
    VARSimulation sim;
    try {
      sim = simulate_var(spec, rep, xi, cfg_.var.T, *seed);
    } catch (const XiError& e) {
      throw ConfigError(std::string("var.xi: ") + e.what());
    }
    json report{{"rank", rep.rank},
                {"c0", matrix_to_json(rep.c0)},
                {"terms", rep.c.size()},
                {"spectral_radius", rep.spectral_radius},
                {"tail_bound", rep.tail_bound},
                {"simulation", {{"T", cfg_.var.T}, {"max_deviation", sim.max_deviation}, {"bound", sim.bound}, {"agree", sim.agree()}}}};
    emit("var_report", report);
    if (!sim.agree()) throw VerificationFailure{"Granger form and VAR recursion disagree"};
    return kOk;
  }

  int bridge() {
    const auto m = measure("bridge");
    const auto& b = cfg_.bridge;
    const double tol = opts_.tol.value_or(b.tol);
    int lag_cap = 1;
    if (b.lag_cap) {
      lag_cap = *b.lag_cap;
    } else {
      lag_cap = int(std::lround(m.max_atom_location() / b.step)) + 1;
      if (m.has_density()) lag_cap = std::max(lag_cap, int(std::ceil(m.density_support(1e-7) / b.step)) + 2);
    }
    const auto var = discretization_bridge(m, b.step, lag_cap);
    const CharacteristicFunction cf(m);
    const auto st = cointegration_structure(cf, cfg_.analysis.rank_tol);
    json report{{"step", b.step}, {"lag_cap", lag_cap}, {"continuous_rank", st.rank}, {"tol", tol}};
    bool pass = true;
    if (st.rank > 0 && st.rank < m.dim()) {
      const auto disc = var_granger(var);
      const double angle = disc.rank == st.rank ? max_principal_angle(disc.beta, st.beta) : M_PI / 2.0;
      report["discrete_rank"] = disc.rank;
      report["principal_angle"] = angle;
      pass = angle <= tol;
    }
    json roots = json::array();
    for (const auto& r : match_roots(var, m, b.step, b.roots)) {
      roots.push_back({{"discrete", complex_json(r.discrete)}, {"continuous", complex_json(r.continuous)},
                       {"deviation", r.deviation}});
    }
    report["roots"] = roots;
    report["pass"] = pass;
    emit("bridge_report", report);
    if (!pass) throw VerificationFailure{"principal angle exceeds " + format_number(tol)};
    return kOk;
  }

  int verify() {
    AcceptanceOptions ao;
    ao.artifact_dir = (dir_ / "verify_artifacts").string();
    const auto results = run_acceptance(ao);
    write_json(dir_ / "verify_report.json", acceptance_report(results));
    std::string failed;
    for (const auto& r : results) {
      out_ << format_line(r, true) << '\n';
      if (!r.pass) failed += (failed.empty() ? "" : ", ") + std::to_string(r.id) + " [" + r.name + "]";
    }
    if (!failed.empty()) throw VerificationFailure{"failing criteria: " + failed};
    return kOk;
  }

 private:
  SignedMatrixMeasure measure(const char* cmd) const {
    switch (cfg_.model.kind) {
      case ModelConfig::Kind::Measure:
        return *cfg_.model.measure;
      case ModelConfig::Kind::Mcarma:
        return msdde_from_mcarma(*cfg_.model.mcarma);
      case ModelConfig::Kind::Var:
        break;
    }
    throw ConfigError(std::string("model.type: ") + cmd + " needs a measure or mcarma model");
  }

  void emit(const std::string& name, const json& report) {
    if (cfg_.report_format == "text") {
      std::ostringstream os;
      flatten(report, "", os);
      write_file(dir_ / (name + ".txt"), os.str());
    } else {
      write_json(dir_ / (name + ".json"), report);
    }
    out_ << "wrote " << (dir_ / name).string() << (cfg_.report_format == "text" ? ".txt" : ".json") << '\n';
  }

  static json condition_json(const ConditionReport& r) {
    return {{"zero_count_right_halfplane", r.zero_count_right_halfplane},
            {"zero_at_origin", r.zero_at_origin},
            {"pole_simple", r.pole_simple},
            {"route_a_pass", r.route_a_pass},
            {"route_b_pass", r.route_b_pass},
            {"verdict", to_string(r.verdict)},
            {"origin_multiplicity", r.origin_multiplicity},
            {"epsilon", r.epsilon},
            {"radius", r.radius},
            {"rank", r.rank},
            {"bracket_condition", r.bracket_condition}};
  }

  static json structure_json(const CointegrationStructure& s) {
    return {{"pi0", matrix_to_json(s.pi0)},          {"rank", s.rank},
            {"alpha", matrix_to_json(s.alpha)},      {"beta", matrix_to_json(s.beta)},
            {"alpha_perp", matrix_to_json(s.alpha_perp)}, {"beta_perp", matrix_to_json(s.beta_perp)},
            {"c0", matrix_to_json(s.c0)},            {"pi_total", matrix_to_json(s.pi_total)}};
  }

  static std::string gnuplot_script(const std::vector<std::pair<std::string, VarianceProfile>>& profiles) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
          "set xlabel 't'\n"
          "set ylabel 'Var(gamma^T (X_t - X_0))'\n"
          "set key left top\n"
          "plot ";
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto& label = profiles[i].first;
      gp << (i ? ", \\\n     " : "") << "'variance.csv' using 1:(strcol(2) eq ' " << label
         << "' ? $3 : 1/0) with lines title '" << label << "'";
    }
    gp << '\n';
    return gp.str();
  }

  static json ecf_report(const SolutionPath& path, const SignedMatrixMeasure& m, std::uint64_t seed, int count,
                         const json& slopes) {
    const PiFunction pi(m);
    double u = m.max_atom_location();
    if (m.has_density()) u = std::max(u, std::log(std::max(pi.decay_constant(), 1e-300) / kPiTail) / pi.decay_rate());
    const long lo = path.first_index() + long(std::ceil(u / path.step)) + 1;
    const long hi = path.last_index();
    json report{{"pi_horizon", u}, {"pi_tail_bound", m.has_density() ? kPiTail : 0.0}, {"variance_slopes", slopes}};
    if (hi - lo < 2 || count < 1) {
      report["pairs"] = 0;
      report["note"] = "path too short for the pi history window";
      return report;
    }
    CounterStream rng(seed, 0xEC, 0);
    std::vector<std::pair<long, long>> pairs;
    for (int i = 0; i < count; ++i) {
      long s = lo + long(rng.uniform() * double(hi - lo));
      long t = lo + long(rng.uniform() * double(hi - lo));
      if (s > t) std::swap(s, t);
      if (s == t) t = std::min(hi, t + 1);
      if (s == t) --s;
      pairs.emplace_back(s, t);
    }
    const auto res = ecf_residuals(path, m, pairs, u);
    double sq = 0.0, mx = 0.0;
    for (const auto& v : res) {
      sq += v.squaredNorm();
      mx = std::max(mx, v.norm());
    }
    report["pairs"] = count;
    report["rms_residual"] = std::sqrt(sq / double(count));
    report["max_residual"] = mx;
    return report;
  }

  const Options& opts_;
  std::ostream& out_;
  fs::path dir_;
  RunConfig cfg_;
};

}  // namespace

int run(const std::string& subcommand, const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(opts.out, ec);
    if (ec) throw ConfigError("--out: cannot create " + opts.out + ": " + ec.message());
    Runner runner(opts, out);
    if (subcommand == "verify") return runner.verify();
    if (opts.config.empty()) throw ConfigError("--config: required for " + subcommand);
    runner.load();
    if (subcommand == "analyze") return runner.analyze();
    if (subcommand == "kernel") return runner.kernel();
    if (subcommand == "simulate") return runner.simulate();
    if (subcommand == "mcarma") return runner.mcarma();
    if (subcommand == "var-oracle") return runner.var_oracle();
    if (subcommand == "bridge") return runner.bridge();
    throw ConfigError("unknown subcommand \"" + subcommand + "\"");
  } catch (const VerificationFailure& f) {
    err << "verification failed: " << f.what << '\n';
    return kVerificationFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CholeskyError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
}

}  // namespace cointegra::cli
