#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cointegra/errors.hpp"
#include "cointegra/fixtures.hpp"

namespace cointegra::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void expect_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) fail(join(path, item.key()), "unknown key");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(join(path, key), "missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

std::uint64_t seed_value(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long v = integer(j, path);
  if (v < 0) fail(path, "seed must be >= 0");
  return std::uint64_t(v);
}

Vec vector_of(const json& j, const std::string& path, long size = -1) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (size >= 0 && long(j.size()) != size) fail(path, "expected " + std::to_string(size) + " entries");
  Vec v(long(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(long(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Mat matrix_of(const json& j, const std::string& path, long rows = -1, long cols = -1) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const long r = long(j.size());
  if (rows >= 0 && r != rows) fail(path, "expected " + std::to_string(rows) + " rows");
  if (!j[0].is_array()) fail(path, "expected an array of rows");
  const long c = long(j[0].size());
  if (cols >= 0 && c != cols) fail(path, "expected " + std::to_string(cols) + " columns");
  Mat m(r, c);
  for (long i = 0; i < r; ++i) m.row(i) = vector_of(j[std::size_t(i)], path + "[" + std::to_string(i) + "]", c);
  return m;
}

std::vector<Mat> matrices_of(const json& j, const std::string& path, long count, long n) {
  if (!j.is_array()) fail(path, "expected an array of matrices");
  if (long(j.size()) != count) fail(path, "expected " + std::to_string(count) + " matrices");
  std::vector<Mat> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix_of(j[i], path + "[" + std::to_string(i) + "]", n, n));
  return out;
}

Complex complex_of(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  fail(path, "expected a number or [re, im]");
}

int dim_of(const json& j, const std::string& path) {
  const long n = integer(require(j, path, "dim"), join(path, "dim"));
  if (n < 1 || n > 64) fail(join(path, "dim"), "must lie in [1, 64]");
  return int(n);
}

SignedMatrixMeasure parse_measure(const json& j, const std::string& path) {
  expect_keys(j, path, {"type", "dim", "atoms", "density", "decay_rate"});
  const int n = dim_of(j, path);
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const auto& a = j.at("atoms");
    const std::string apath = join(path, "atoms");
    if (!a.is_array()) fail(apath, "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = apath + "[" + std::to_string(i) + "]";
      expect_keys(a[i], p, {"t", "A"});
      const double t = number(require(a[i], p, "t"), join(p, "t"));
      if (t < 0.0) fail(join(p, "t"), "atom location must be >= 0");
      atoms.push_back(Atom{t, matrix_of(require(a[i], p, "A"), join(p, "A"), n, n)});
    }
  }
  Density density;
  if (j.contains("density")) {
    const auto& d = j.at("density");
    const std::string dpath = join(path, "density");
    if (!d.is_object()) fail(dpath, "expected an object");
    const auto& type = require(d, dpath, "kind");
    if (type == "none") {
      expect_keys(d, dpath, {"kind"});
    } else if (type == "matexp") {
      expect_keys(d, dpath, {"kind", "H", "F", "G"});
      MatExpDensity me;
      me.F = matrix_of(require(d, dpath, "F"), join(dpath, "F"));
      me.H = matrix_of(require(d, dpath, "H"), join(dpath, "H"), n, me.F.rows());
      me.G = matrix_of(require(d, dpath, "G"), join(dpath, "G"), me.F.rows(), n);
      density = me;
    } else if (type == "sampled") {
      expect_keys(d, dpath, {"kind", "step", "values", "tail_K", "tail_lambda"});
      SampledDensity sd;
      sd.step = positive(require(d, dpath, "step"), join(dpath, "step"));
      const auto& v = require(d, dpath, "values");
      if (!v.is_array() || v.size() < 2) fail(join(dpath, "values"), "expected at least two matrices");
      for (std::size_t i = 0; i < v.size(); ++i) {
        sd.values.push_back(matrix_of(v[i], join(dpath, "values") + "[" + std::to_string(i) + "]", n, n));
      }
      if (d.contains("tail_K")) sd.tail_K = number(d.at("tail_K"), join(dpath, "tail_K"));
      if (d.contains("tail_lambda")) sd.tail_lambda = positive(d.at("tail_lambda"), join(dpath, "tail_lambda"));
      density = sd;
    } else {
      fail(join(dpath, "kind"), "expected \"none\", \"matexp\" or \"sampled\"");
    }
  }
  std::optional<double> decay;
  if (j.contains("decay_rate")) decay = positive(j.at("decay_rate"), join(path, "decay_rate"));
  try {
    return SignedMatrixMeasure(n, std::move(atoms), std::move(density), decay);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

MCARMASpec parse_mcarma(const json& j, const std::string& path) {
  expect_keys(j, path, {"type", "dim", "p", "P", "Q"});
  MCARMASpec s;
  s.dim = dim_of(j, path);
  const long p = integer(require(j, path, "p"), join(path, "p"));
  if (p < 1 || p > 32) fail(join(path, "p"), "must lie in [1, 32]");
  s.p = int(p);
  s.P = matrices_of(require(j, path, "P"), join(path, "P"), p, s.dim);
  if (p > 1 || j.contains("Q")) {
    s.Q = matrices_of(require(j, path, "Q"), join(path, "Q"), p - 1, s.dim);
  }
  return s;
}

VARSpec parse_var(const json& j, const std::string& path) {
  expect_keys(j, path, {"type", "dim", "p", "Gamma", "Sigma_eps"});
  VARSpec s;
  s.dim = dim_of(j, path);
  const long p = integer(require(j, path, "p"), join(path, "p"));
  if (p < 1 || p > 100000) fail(join(path, "p"), "must lie in [1, 100000]");
  s.p = int(p);
  s.gamma = matrices_of(require(j, path, "Gamma"), join(path, "Gamma"), p, s.dim);
  s.sigma_eps = j.contains("Sigma_eps") ? matrix_of(j.at("Sigma_eps"), join(path, "Sigma_eps"), s.dim, s.dim)
                                        : Mat(Mat::Identity(s.dim, s.dim));
  try {
    s.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return s;
}

ModelConfig parse_model(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto& type = require(j, path, "type");
  if (!type.is_string()) fail(join(path, "type"), "expected a string");
  ModelConfig m;
  const auto t = type.get<std::string>();
  if (t == "measure") {
    m.kind = ModelConfig::Kind::Measure;
    m.measure = parse_measure(j, path);
  } else if (t == "mcarma") {
    m.kind = ModelConfig::Kind::Mcarma;
    m.mcarma = parse_mcarma(j, path);
  } else if (t == "var") {
    m.kind = ModelConfig::Kind::Var;
    m.var = parse_var(j, path);
  } else if (t == "fixture") {
    expect_keys(j, path, {"type", "name"});
    const auto& name = require(j, path, "name");
    const std::string nm = name.is_string() ? name.get<std::string>() : "";
    if (nm == "ou_stationary") {
      m.measure = fixtures::ou_stationary();
    } else if (nm == "ou_cointegrated") {
      m.measure = fixtures::ou_cointegrated();
    } else if (nm == "unit_delay") {
      m.measure = fixtures::unit_delay();
    } else if (nm == "mcarma_p1") {
      m.kind = ModelConfig::Kind::Mcarma;
      m.mcarma = fixtures::mcarma_p1();
    } else if (nm == "mcarma_bivariate") {
      m.kind = ModelConfig::Kind::Mcarma;
      m.mcarma = fixtures::mcarma_bivariate();
    } else if (nm == "mcarma_random") {
      m.kind = ModelConfig::Kind::Mcarma;
      m.mcarma = fixtures::mcarma_random();
    } else if (nm == "var_bivariate" || nm == "var_random_walk" || nm == "var_ar1") {
      m.kind = ModelConfig::Kind::Var;
      m.var = nm == "var_bivariate" ? fixtures::var_bivariate()
              : nm == "var_ar1"     ? fixtures::var_ar1()
                                    : fixtures::var_random_walk();
    } else {
      fail(join(path, "name"), "unknown fixture \"" + nm + "\"");
    }
  } else {
    fail(join(path, "type"), "expected one of measure, mcarma, var, fixture");
  }
  return m;
}

LevyModel parse_levy(const json& j, const std::string& path, int n) {
  expect_keys(j, path, {"drift", "gaussian_cov", "jumps"});
  LevyModel m;
  m.dim = n;
  m.drift = j.contains("drift") ? vector_of(j.at("drift"), join(path, "drift"), n) : Vec(Vec::Zero(n));
  m.gaussian_cov = j.contains("gaussian_cov") ? matrix_of(j.at("gaussian_cov"), join(path, "gaussian_cov"), n, n)
                                              : Mat(Mat::Identity(n, n));
  if (j.contains("jumps")) {
    const auto& jj = j.at("jumps");
    const std::string jp = join(path, "jumps");
    expect_keys(jj, jp, {"rate", "distribution", "mean", "cov", "values", "probabilities"});
    JumpSpec js;
    js.rate = number(require(jj, jp, "rate"), join(jp, "rate"));
    if (js.rate < 0.0) fail(join(jp, "rate"), "must be >= 0");
    const auto& dist = require(jj, jp, "distribution");
    if (dist == "gaussian") {
      js.kind = JumpSpec::Kind::Gaussian;
      js.mean = vector_of(require(jj, jp, "mean"), join(jp, "mean"), n);
      js.cov = matrix_of(require(jj, jp, "cov"), join(jp, "cov"), n, n);
    } else if (dist == "discrete") {
      js.kind = JumpSpec::Kind::Discrete;
      const auto& vals = require(jj, jp, "values");
      if (!vals.is_array()) fail(join(jp, "values"), "expected an array of vectors");
      for (std::size_t i = 0; i < vals.size(); ++i) {
        js.values.push_back(vector_of(vals[i], join(jp, "values") + "[" + std::to_string(i) + "]", n));
      }
      const Vec pr = vector_of(require(jj, jp, "probabilities"), join(jp, "probabilities"), long(js.values.size()));
      js.probabilities.assign(pr.data(), pr.data() + pr.size());
    } else {
      fail(join(jp, "distribution"), "expected \"gaussian\" or \"discrete\"");
    }
    m.jumps = js;
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return m;
}

int model_dim(const ModelConfig& m) {
  if (m.measure) return m.measure->dim();
  if (m.mcarma) return m.mcarma->dim;
  return m.var->dim;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  expect_keys(doc, "", {"model", "analysis", "kernel", "simulation", "var", "bridge", "mcarma", "report_format"});
  RunConfig cfg;
  cfg.model = parse_model(require(doc, "", "model"), "model");
  const int n = model_dim(cfg.model);

  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    expect_keys(a, "analysis", {"rank_tol", "scan"});
    if (a.contains("rank_tol")) cfg.analysis.rank_tol = positive(a.at("rank_tol"), "analysis.rank_tol");
    if (a.contains("scan")) {
      const auto& s = a.at("scan");
      expect_keys(s, "analysis.scan", {"epsilon", "radius", "refinement", "indentation"});
      if (s.contains("epsilon")) cfg.analysis.scan.epsilon = positive(s.at("epsilon"), "analysis.scan.epsilon");
      if (s.contains("radius")) cfg.analysis.scan.radius = positive(s.at("radius"), "analysis.scan.radius");
      if (s.contains("refinement")) {
        const long r = integer(s.at("refinement"), "analysis.scan.refinement");
        if (r < 1 || r > 40) fail("analysis.scan.refinement", "must lie in [1, 40]");
        cfg.analysis.scan.refinement = int(r);
      }
      if (s.contains("indentation")) {
        cfg.analysis.scan.indentation = positive(s.at("indentation"), "analysis.scan.indentation");
      }
    }
  }
  if (doc.contains("kernel")) {
    const auto& k = doc.at("kernel");
    expect_keys(k, "kernel", {"step", "horizon", "truncation_target", "z_samples", "tol", "output_stride"});
    if (k.contains("step")) cfg.kernel.step = positive(k.at("step"), "kernel.step");
    if (k.contains("horizon")) cfg.kernel.horizon = positive(k.at("horizon"), "kernel.horizon");
    if (k.contains("truncation_target")) {
      cfg.kernel.truncation_target = positive(k.at("truncation_target"), "kernel.truncation_target");
    }
    if (k.contains("z_samples")) {
      const auto& z = k.at("z_samples");
      if (!z.is_array() || z.empty()) fail("kernel.z_samples", "expected a non-empty array");
      cfg.kernel.z_samples.clear();
      for (std::size_t i = 0; i < z.size(); ++i) {
        const auto path = "kernel.z_samples[" + std::to_string(i) + "]";
        const Complex c = complex_of(z[i], path);
        if (c.real() < 0.1) fail(path, "Re z must be >= 0.1");
        cfg.kernel.z_samples.push_back(c);
      }
    }
    if (k.contains("tol")) cfg.kernel.tol = positive(k.at("tol"), "kernel.tol");
    if (k.contains("output_stride")) {
      const long s = integer(k.at("output_stride"), "kernel.output_stride");
      if (s < 1) fail("kernel.output_stride", "must be >= 1");
      cfg.kernel.output_stride = std::size_t(s);
    }
  }
  if (doc.contains("simulation")) {
    const auto& s = doc.at("simulation");
    const std::string p = "simulation";
    expect_keys(s, p, {"step", "horizon", "burn_in", "paths", "seed", "xi", "directions", "levy", "output_stride",
                       "paths_written", "ecf_pairs"});
    auto& sim = cfg.simulation;
    if (s.contains("step")) sim.step = positive(s.at("step"), "simulation.step");
    if (s.contains("horizon")) sim.horizon = positive(s.at("horizon"), "simulation.horizon");
    if (s.contains("burn_in")) sim.burn_in = positive(s.at("burn_in"), "simulation.burn_in");
    if (s.contains("paths")) {
      const long v = integer(s.at("paths"), "simulation.paths");
      if (v < 2) fail("simulation.paths", "must be >= 2");
      sim.paths = std::size_t(v);
    }
    if (s.contains("seed")) sim.seed = seed_value(s.at("seed"), "simulation.seed");
    if (s.contains("xi")) sim.xi = vector_of(s.at("xi"), "simulation.xi", n);
    if (s.contains("directions")) {
      const auto& d = s.at("directions");
      if (!d.is_array()) fail("simulation.directions", "expected an array");
      for (std::size_t i = 0; i < d.size(); ++i) {
        const auto dp = "simulation.directions[" + std::to_string(i) + "]";
        expect_keys(d[i], dp, {"label", "gamma"});
        const auto& label = require(d[i], dp, "label");
        if (!label.is_string()) fail(dp + ".label", "expected a string");
        sim.directions.emplace_back(label.get<std::string>(), vector_of(require(d[i], dp, "gamma"), dp + ".gamma", n));
      }
    }
    if (s.contains("levy")) sim.levy = parse_levy(s.at("levy"), "simulation.levy", n);
    if (s.contains("output_stride")) {
      const long v = integer(s.at("output_stride"), "simulation.output_stride");
      if (v < 1) fail("simulation.output_stride", "must be >= 1");
      sim.output_stride = std::size_t(v);
    }
    if (s.contains("paths_written")) {
      const long v = integer(s.at("paths_written"), "simulation.paths_written");
      if (v < 0) fail("simulation.paths_written", "must be >= 0");
      sim.paths_written = std::size_t(v);
    }
    if (s.contains("ecf_pairs")) {
      const long v = integer(s.at("ecf_pairs"), "simulation.ecf_pairs");
      if (v < 0) fail("simulation.ecf_pairs", "must be >= 0");
      sim.ecf_pairs = int(v);
    }
  }
  if (doc.contains("var")) {
    const auto& v = doc.at("var");
    expect_keys(v, "var", {"T", "seed", "tol", "xi"});
    if (v.contains("T")) {
      cfg.var.T = integer(v.at("T"), "var.T");
      if (cfg.var.T < 1) fail("var.T", "must be >= 1");
    }
    if (v.contains("seed")) cfg.var.seed = seed_value(v.at("seed"), "var.seed");
    if (v.contains("tol")) cfg.var.tol = positive(v.at("tol"), "var.tol");
    if (v.contains("xi")) cfg.var.xi = vector_of(v.at("xi"), "var.xi", n);
  }
  if (doc.contains("bridge")) {
    const auto& b = doc.at("bridge");
    expect_keys(b, "bridge", {"step", "lag_cap", "roots", "tol"});
    if (b.contains("step")) cfg.bridge.step = positive(b.at("step"), "bridge.step");
    if (b.contains("lag_cap")) {
      const long v = integer(b.at("lag_cap"), "bridge.lag_cap");
      if (v < 1) fail("bridge.lag_cap", "must be >= 1");
      cfg.bridge.lag_cap = int(v);
    }
    if (b.contains("roots")) {
      const long v = integer(b.at("roots"), "bridge.roots");
      if (v < 0) fail("bridge.roots", "must be >= 0");
      cfg.bridge.roots = int(v);
    }
    if (b.contains("tol")) cfg.bridge.tol = positive(b.at("tol"), "bridge.tol");
  }
  if (doc.contains("mcarma")) {
    const auto& m = doc.at("mcarma");
    expect_keys(m, "mcarma", {"tol"});
    if (m.contains("tol")) cfg.mcarma.tol = positive(m.at("tol"), "mcarma.tol");
  }
  if (doc.contains("report_format")) {
    const auto& f = doc.at("report_format");
    if (f != "json" && f != "text") fail("report_format", "expected \"json\" or \"text\"");
    cfg.report_format = f.get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json measure_to_json(const SignedMatrixMeasure& m) {
  json out{{"type", "measure"}, {"dim", m.dim()}, {"decay_rate", m.decay_rate()}};
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"t", a.location}, {"A", matrix_to_json(a.weight)}});
  out["atoms"] = atoms;
  if (const auto* me = std::get_if<MatExpDensity>(&m.density())) {
    out["density"] = {{"kind", "matexp"}, {"H", matrix_to_json(me->H)}, {"F", matrix_to_json(me->F)},
                      {"G", matrix_to_json(me->G)}};
  } else if (const auto* sd = std::get_if<SampledDensity>(&m.density())) {
    json values = json::array();
    for (const auto& v : sd->values) values.push_back(matrix_to_json(v));
    out["density"] = {{"kind", "sampled"}, {"step", sd->step}, {"values", values}, {"tail_K", sd->tail_K},
                      {"tail_lambda", sd->tail_lambda}};
  } else {
    out["density"] = {{"kind", "none"}};
  }
  return out;
}

}  // namespace cointegra::cli
