#pragma once

#include <string>
#include <vector>

#include "smyth/pipeline.hpp"

namespace smyth {

struct TaskSpec {
  std::string file;        // relative to the manifest directory
  std::string experiment;  // 1 | 2a | 3a | s
  std::string expected;    // pass | timeout/overspec
  std::string objective;   // top1 | top1r | top1v
  double timeout_s = 20.0;
};

// TSV manifest, one task per line, '#' comments allowed.
std::vector<TaskSpec> parse_manifest(const std::string& path);

struct TaskResult {
  TaskSpec spec;
  std::string outcome;  // pass | overspec | timeout | refuted | no-solution | error
  bool matches_expected = false;
  double wall_s = 0.0;
  int stage = -1;
  int examples = 0;
  std::string detail;  // counterexample or error text
};

// Deterministic small-input enumeration per type (exhaustive, not random).
std::vector<ValuePtr> enumerate_values(const DatatypeContext& sigma, const TypePtr& type);

struct ValidationOutcome {
  bool pass = false;
  std::string counterexample;
};

// Compares the synthesized definition (task + filling) against a reference
// implementation over exhaustive small inputs; first disagreement loses.
ValidationOutcome validate(const Elaborated& task, const Solution& solution,
                           const Elaborated& reference);

// Value-compare mode: each root hole's filling must evaluate to the value of
// the reference file's definition with the same position.
ValidationOutcome validate_values(const Elaborated& task, const Solution& solution,
                                  const Elaborated& reference);

TaskResult run_task(const TaskSpec& spec, const std::string& base_dir,
                    const ForgeOptions& base);

std::vector<TaskResult> run_suite(const std::string& manifest_path, const ForgeOptions& base,
                                  int jobs);

std::string suite_tsv(const std::vector<TaskResult>& results);

}  // namespace smyth
