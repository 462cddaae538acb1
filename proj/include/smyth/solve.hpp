#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smyth/constraints.hpp"

namespace smyth {

struct StageParams {
  int max_term_size;
  int max_scrutinee_size;
  int max_match_depth;
};

// Fixed schedule of nondecreasing budgets; the search restarts per stage.
std::vector<StageParams> stage_schedule();

struct Solution {
  HoleFilling filling;
  HoleContext new_holes;
  int total_size = 0;
};

// Stable sort by total size ascending, then discovery order.
std::vector<Solution> rank(std::vector<Solution> solutions);

struct SolverOptions {
  std::vector<StageParams> stages = stage_schedule();
  long fuel = 1000;
  UnevalConfig uneval;
  double timeout_s = 120.0;
  int max_branch_combos = 64;
  size_t max_initial_constraints = 256;
};

struct Refinement {
  ExprPtr expr;
  std::vector<Goal> goals;
};

struct BranchCandidate {
  ExprPtr expr;
  std::vector<Goal> goals;
  Constraints constraints;
};

class Solver {
 public:
  Solver(const DatatypeContext& sigma, HoleContext delta, SolverOptions opts);

  struct Outcome {
    std::vector<Solution> solutions;  // discovery order within winning stage
    int stage_index = -1;
    bool timed_out = false;
  };

  // Runs the stage schedule over the given initial constraint sets. Stops at
  // the first stage yielding solutions; collects until `max_solutions` or
  // until `stop_when` accepts one.
  Outcome run(const std::vector<Constraints>& k0s,
              const std::map<HoleId, int>& hole_case_depths, size_t max_solutions,
              const std::function<bool(const Solution&)>& stop_when = {});

  // --- individual operations, exposed for testing ---

  using ExprSink = std::function<bool(const ExprPtr&)>;
  // Elimination-form enumeration in nondecreasing size with the
  // structural-decrease restriction on recursive calls.
  bool guess(const TypeCtx& ctx, const TypePtr& type, int size_budget, const ExprSink& sink);

  std::optional<Refinement> refine(const TypeCtx& ctx, const std::vector<World>& worlds,
                                   const TypePtr& type);

  using BranchSink = std::function<bool(const BranchCandidate&)>;
  bool branch(const HoleFilling& filling, const TypeCtx& ctx,
              const std::vector<World>& worlds, const TypePtr& type,
              const StageParams& stage, const BranchSink& sink);

  struct FillResult {
    Constraints constraints;
    std::vector<Goal> goals;
  };
  using FillSink = std::function<bool(const FillResult&)>;
  bool fill(HoleId hole, const HoleFilling& filling, const TypeCtx& ctx,
            const std::vector<World>& worlds, const TypePtr& type, const StageParams& stage,
            int case_depth, const FillSink& sink);

  using SolutionSink = std::function<bool(const Solution&)>;
  bool solve(const Constraints& k, const SolutionSink& sink);

  const HoleContext& delta() const { return delta_; }
  void set_stage(const StageParams& stage) { stage_ = stage; }
  void set_case_depths(const std::map<HoleId, int>& depths) { depth_ = depths; }

  struct Stats {
    long candidates_checked = 0;
    long merge_divergences = 0;
  };
  const Stats& stats() const { return stats_; }

 private:
  HoleId fresh_hole(const TypeCtx& ctx, const TypePtr& type, int case_depth);
  QueryCtx query() const;
  Ident fresh_name(const TypeCtx& ctx, const std::string& base) const;
  bool decreasing_first_arg(const TypeCtx& ctx, const Ident& rec_param, const ExprPtr& arg) const;

  struct Typed {
    TypePtr type;
    ExprPtr expr;
    bool appable;  // var or application spine (legal function position)
  };
  const std::vector<Typed>& elims(const TypeCtx& ctx, int size);

  const DatatypeContext& sigma_;
  HoleContext delta_;
  SolverOptions opts_;
  StageParams stage_{1, 0, 0};
  std::map<HoleId, int> depth_;
  HoleId next_hole_ = 0;
  HoleId first_fresh_ = 0;
  std::chrono::steady_clock::time_point deadline_{};
  std::map<std::string, std::vector<Typed>> elim_cache_;
  Stats stats_;
};

}  // namespace smyth
