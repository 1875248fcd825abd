#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "cointegra/csv.hpp"
#include "cointegra/fixtures.hpp"
#include "helpers.hpp"

using namespace cointegra;
using namespace cointegra::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cointegra_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::string& cmd, const fs::path& dir, const std::string& config,
               std::optional<std::uint64_t> seed = std::nullopt) {
  Options opts;
  opts.config = write_config(dir, config).string();
  opts.out = (dir / "out").string();
  opts.seed = seed;
  std::ostringstream out, err;
  const int code = run(cmd, opts, out, err);
  return {code, out.str(), err.str()};
}

const char* kOu = R"({"model": {"type": "measure", "dim": 2, "atoms": [{"t": 0, "A": [[-1, 1], [0, 0]]}]}})";

}  // namespace

TEST_CASE("measure configs round trip") {
  const auto m = msdde_from_mcarma(fixtures::mcarma_bivariate());
  const auto cfg = parse_config(json{{"model", measure_to_json(m)}});
  REQUIRE(cfg.model.measure);
  const CharacteristicFunction a(m), b(*cfg.model.measure);
  CHECK(testing::max_abs(a(Complex(0.5, 1.0)) - b(Complex(0.5, 1.0))) == 0.0);
}

TEST_CASE("config errors name the field") {
  auto message = [](const std::string& text) {
    try {
      parse_config(json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"model": {"type": "fixture", "name": "ou_cointegrated"}, "kernel": {"stp": 1}})") ==
        "kernel.stp: unknown key");
  CHECK(message(R"({"model": {"type": "measure", "dim": 2, "atoms": [{"t": -1, "A": [[0,0],[0,0]]}]}})")
            .rfind("model.atoms[0].t", 0) == 0);
  CHECK(message(R"({"model": {"type": "measure", "dim": 2, "atoms": [{"t": 0, "A": [[0,0]]}]}})")
            .rfind("model.atoms[0].A", 0) == 0);
  CHECK(message(R"({"model": {"type": "measure", "dim": 1, "density": {"kind": "spline"}}})")
            .rfind("model.density.kind", 0) == 0);
  CHECK(message(R"({"model": {"type": "fixture", "name": "ou_cointegrated"}, "simulation": {"paths": 1}})")
            .rfind("simulation.paths", 0) == 0);
  CHECK(message(R"({"simulation": {}})").rfind("model", 0) == 0);
  CHECK(message(R"({"model": {"type": "fixture", "name": "nope"}})").rfind("model.name", 0) == 0);
}

TEST_CASE("syntax errors report line and column") {
  const auto dir = scratch("syntax");
  const auto p = write_config(dir, "{\n  \"model\": {\n    \"type\" \"fixture\"\n  }\n}\n");
  try {
    load_config(p.string());
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("analyze reports the cointegrated OU structure") {
  const auto dir = scratch("analyze");
  const auto r = invoke("analyze", dir, kOu);
  REQUIRE(r.code == kOk);
  const auto rep = json::parse(slurp(dir / "out" / "analyze.json"));
  CHECK(rep["condition_report"]["verdict"] == "Cointegrated");
  CHECK(rep["structure"]["rank"] == 1);
  const auto c0 = rep["structure"]["c0"];
  CHECK(std::abs(c0[0][0].get<double>()) < 1e-12);
  CHECK(std::abs(c0[0][1].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(c0[1][1].get<double>() - 1.0) < 1e-12);
}

TEST_CASE("simulate without a seed is a config error") {
  const auto dir = scratch("noseed");
  const auto r = invoke("simulate", dir, R"({"model": {"type": "fixture", "name": "ou_cointegrated"}})");
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("simulation.seed") != std::string::npos);
}

TEST_CASE("simulate is idempotent and honours --seed") {
  const char* cfg = R"({"model": {"type": "fixture", "name": "ou_cointegrated"},
    "kernel": {"horizon": 10},
    "simulation": {"step": 0.05, "horizon": 5, "paths": 8, "seed": 3, "output_stride": 2}})";
  const auto a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  REQUIRE(invoke("simulate", a, cfg).code == kOk);
  REQUIRE(invoke("simulate", b, cfg).code == kOk);
  REQUIRE(invoke("simulate", c, cfg, 4).code == kOk);
  for (const char* f : {"paths.csv", "variance.csv", "variance.gp", "ecf_report.json"}) {
    CHECK(slurp(a / "out" / f) == slurp(b / "out" / f));
  }
  CHECK(slurp(a / "out" / "paths.csv") != slurp(c / "out" / "paths.csv"));
  CHECK(slurp(a / "out" / "paths.csv").rfind("path_id, t, X_1, X_2\n", 0) == 0);
}

TEST_CASE("kernel writes the CSV and a passing Laplace report") {
  const auto dir = scratch("kernel");
  const auto r = invoke("kernel", dir, R"({"model": {"type": "fixture", "name": "ou_stationary"},
    "kernel": {"step": 0.01, "output_stride": 10}})");
  REQUIRE(r.code == kOk);
  const auto rep = json::parse(slurp(dir / "out" / "laplace_report.json"));
  CHECK(rep["pass"] == true);
  const auto csv = slurp(dir / "out" / "kernel.csv");
  CHECK(csv.rfind("t, Ctilde_11", 0) == 0);
}

TEST_CASE("a failed numerical check exits with 1") {
  const auto dir = scratch("tolfail");
  Options opts;
  opts.config = write_config(dir, R"({"model": {"type": "fixture", "name": "ou_stationary"},
    "kernel": {"step": 0.1, "horizon": 3}})").string();
  opts.out = (dir / "out").string();
  opts.tol = 1e-12;
  std::ostringstream out, err;
  CHECK(run("kernel", opts, out, err) == kVerificationFailure);
  CHECK(err.str().find("verification failed") != std::string::npos);
}

TEST_CASE("mcarma, var-oracle and bridge subcommands") {
  const auto dir = scratch("others");
  CHECK(invoke("mcarma", dir, R"({"model": {"type": "fixture", "name": "mcarma_random"}})").code == kOk);
  const auto bridged = json::parse(slurp(dir / "out" / "bridged_measure.json"));
  CHECK(parse_config(bridged).model.measure.has_value());
  CHECK(json::parse(slurp(dir / "out" / "c0_report.json"))["pass"] == true);
  CHECK(invoke("var-oracle", dir, R"({"model": {"type": "fixture", "name": "var_bivariate"}, "var": {"seed": 2}})").code == kOk);
  CHECK(slurp(dir / "out" / "granger.csv").rfind("j, C_11", 0) == 0);
  CHECK(invoke("bridge", dir, R"({"model": {"type": "fixture", "name": "unit_delay"}, "bridge": {"roots": 2}})").code == kOk);
  CHECK(json::parse(slurp(dir / "out" / "bridge_report.json"))["lag_cap"] == 101);
  CHECK(invoke("mcarma", dir, kOu).code == kConfigError);
  CHECK(invoke("var-oracle", dir, kOu).code == kConfigError);
}

TEST_CASE("text reports") {
  const auto dir = scratch("text");
  const auto r = invoke("analyze", dir, R"({"model": {"type": "fixture", "name": "ou_cointegrated"}, "report_format": "text"})");
  REQUIRE(r.code == kOk);
  CHECK(slurp(dir / "out" / "analyze.txt").find("condition_report.verdict: \"Cointegrated\"") != std::string::npos);
}

TEST_CASE("missing config and unknown subcommands") {
  Options opts;
  opts.out = scratch("missing").string();
  std::ostringstream out, err;
  CHECK(run("analyze", opts, out, err) == kConfigError);
  opts.config = "/nonexistent/config.json";
  CHECK(run("analyze", opts, out, err) == kConfigError);
}

TEST_CASE("CSV numbers round trip") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) CHECK(std::stod(format_number(x)) == x);
}
