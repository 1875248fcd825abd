#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cointegra::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kConfigError = 2 };

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Runs one subcommand. Reports go to `out`, diagnostics to `err`; the return
/// value is the process exit code.
int run(const std::string& subcommand, const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace cointegra::cli
