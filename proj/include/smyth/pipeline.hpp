#pragma once

#include <optional>
#include <string>

#include "smyth/collect.hpp"
#include "smyth/solve.hpp"
#include "smyth/surface.hpp"
#include "smyth/typecheck.hpp"

namespace smyth {

struct ForgeOptions {
  SolverOptions solver;
  size_t top_n = 1;
  size_t max_solutions = 0;  // 0: same as top_n
  bool only_recursive = false;  // keep collecting until a recursive solution shows up
  bool check_solutions = false;  // re-verify each solution against the assertions
};

struct SolutionReport {
  std::vector<std::pair<HoleId, std::string>> fillings;  // root holes, in order
  int total_size = 0;
  bool recursive = false;
};

struct ForgeReport {
  enum class Status { Solved, Refuted, NoSolution, Timeout, Error };
  Status status = Status::Error;
  std::string error;
  std::vector<SolutionReport> solutions;
  int stage = -1;
  double wall_s = 0.0;
};

const char* status_name(ForgeReport::Status s);
int status_exit_code(ForgeReport::Status s);

// Full pipeline output, with enough structure for validation and testing.
struct ForgeRun {
  ForgeReport report;
  std::optional<Elaborated> elab;
  std::vector<Assertion> assertions;
  std::vector<Solution> ranked;  // every collected solution, ranked
};

ForgeRun forge_source(const std::string& source, const ForgeOptions& opts);

// A complete term uses recursion somewhere reachable from a filled hole.
bool solution_is_recursive(const Elaborated& elab, const Solution& sol);

// Deep filling for a root hole, holes left by deferral printed as holes.
ExprPtr root_filling(const Solution& sol, HoleId h);

}  // namespace smyth
