#pragma once
// Batch front-end: `latfact <command> --instance <path> [--seed N] [--tol X]
// [--budget N] [--out <path>]`. Exit status 0 when every assertion passes,
// 1 on an assertion failure or non-convergence, 2 on input errors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "latfact/io.hpp"

namespace latfact {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

struct Scenario {
  std::string command;
  Instance instance;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int budget = 24;
};

struct RunResult {
  int status = kExitPass;
  nlohmann::json report;
  std::string summary;
};

const std::vector<std::string>& scenario_commands();

// Applies instance-level seed/tol/budget unless overridden on the command line.
Scenario make_scenario(std::string command, Instance instance, std::optional<std::uint64_t> seed,
                       std::optional<double> tol, std::optional<int> budget);

RunResult run(const Scenario& scenario);

// kind: lebesgue-space, random-operator or partition-xi.
std::vector<Instance> generate_instances(const std::string& kind, int count, std::size_t n, std::uint64_t seed);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace latfact
