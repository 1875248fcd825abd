#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cointegra/levy.hpp"
#include "cointegra/mcarma.hpp"
#include "cointegra/spectral.hpp"
#include "cointegra/var_oracle.hpp"

namespace cointegra::cli {

/// Bad config file: parse errors, unknown keys, wrong types or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  enum class Kind { Measure, Mcarma, Var };
  Kind kind = Kind::Measure;
  std::optional<SignedMatrixMeasure> measure;
  std::optional<MCARMASpec> mcarma;
  std::optional<VARSpec> var;
};

struct AnalysisParams {
  double rank_tol = 1e-8;
  ScanOptions scan;
};

struct KernelParams {
  std::optional<double> step;
  std::optional<double> horizon;
  double truncation_target = 1e-8;
  std::vector<Complex> z_samples{0.5, 1.0, 2.0, Complex(1.0, 3.0)};
  double tol = 1e-5;
  std::size_t output_stride = 1;
};

struct SimulationParams {
  double step = 0.01;
  double horizon = 10.0;
  std::optional<double> burn_in;
  std::size_t paths = 100;
  /// Required by simulate unless --seed is given.
  std::optional<std::uint64_t> seed;
  std::optional<Vec> xi;
  std::vector<std::pair<std::string, Vec>> directions;
  std::optional<LevyModel> levy;
  std::size_t output_stride = 1;
  std::size_t paths_written = 10;
  int ecf_pairs = 100;
};

struct VarParams {
  long T = 1000;
  std::optional<std::uint64_t> seed;
  double tol = 1e-12;
  std::optional<Vec> xi;
};

struct BridgeParams {
  double step = 0.01;
  std::optional<int> lag_cap;
  int roots = 5;
  double tol = 1e-8;
};

struct McarmaParams {
  double tol = 1e-8;
};

struct RunConfig {
  ModelConfig model;
  AnalysisParams analysis;
  KernelParams kernel;
  SimulationParams simulation;
  VarParams var;
  BridgeParams bridge;
  McarmaParams mcarma;
  std::string report_format = "json";
};

/// Parses a config document; errors name the offending field path.
RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; JSON syntax errors report line and column.
RunConfig load_config(const std::string& path);

nlohmann::json matrix_to_json(const Mat& m);
nlohmann::json vector_to_json(const Vec& v);
/// Measure config block {"type": "measure", ...} consumable by parse_config.
nlohmann::json measure_to_json(const SignedMatrixMeasure& m);

}  // namespace cointegra::cli
