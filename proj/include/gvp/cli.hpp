#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gvp/problem.hpp"

namespace gvp::cli {

struct Flags {
  std::string out_path;  // empty -> stdout
  std::vector<std::pair<std::string, std::string>> csv;  // (kind, path)
  std::optional<unsigned long> seed;
  double tol = 1e-6;
  std::string measure_path;
  std::vector<double> eta;
  std::optional<double> value_bound;
  int plate = 0;
  bool trace = false;
};

struct RunResult {
  int exit_code = 0;
  nlohmann::ordered_json report;
};

// Dispatch for validate | solve | certify | exhaust | capacity on a parsed
// problem. Exit codes: 0 success, 1 certification failure, 2 infeasibility
// or validation failure, 3 internal error.
RunResult run(const std::string& command, const ProblemFile& pf, const Flags& flags);

int exit_code_for(Errc code);

int run_main(int argc, char** argv);

}  // namespace gvp::cli
