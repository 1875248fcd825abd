#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cointegra::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
  double seconds = 0.0;        // wall time, never written to artifacts
  double limit_seconds = 0.0;  // 0 when the criterion has no runtime limit
};

struct AcceptanceOptions {
  /// Directory for CSV/JSON artifacts; empty writes nothing.
  std::string artifact_dir;
  /// Worker cap for ensembles (0 = thread_limit()).
  unsigned threads = 0;
  /// Restrict to these criterion ids (empty = all).
  std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Deterministic artifact set (no timings) for the results.
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results);

/// "criterion N [name]: PASS|FAIL (detail)".
std::string format_line(const CriterionResult& r, bool with_time);

}  // namespace cointegra::cli
