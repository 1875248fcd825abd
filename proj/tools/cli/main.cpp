#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cointegra: cointegration analysis for multivariate stochastic delay differential equations"};
  app.require_subcommand(1, 1);
  cointegra::cli::Options opts;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"analyze", "classify the model and report the cointegration structure"},
      {"kernel", "solve the Granger kernels and check the Laplace identities"},
      {"simulate", "simulate Levy-driven paths, variance profiles and ECF residuals"},
      {"mcarma", "bridge an MCARMA(p,p-1) model to a delay measure and compare C0"},
      {"var-oracle", "discrete cointegrated VAR Granger representation and simulation check"},
      {"bridge", "compare the Euler-discretized VAR with the continuous model"},
      {"verify", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "JSON config file");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed, "random seed (overrides the config)");
    sub->add_option("--tol", opts.tol, "verification tolerance (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cointegra::cli::kConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return cointegra::cli::run(name, opts, std::cout, std::cerr);
}
