// Acceptance suite: one line per criterion, exit status 1 if any fails.
#include <cstdio>
#include <iostream>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  cointegra::cli::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--artifacts" && i + 1 < argc) {
      opts.artifact_dir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      opts.only.push_back(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--artifacts DIR] [--only ID]...\n";
      return 2;
    }
  }
  const auto results = cointegra::cli::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << cointegra::cli::format_line(r, true) << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
