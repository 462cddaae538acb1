#include "smyth/pipeline.hpp"

#include <chrono>
#include <functional>
#include <set>

namespace smyth {

const char* status_name(ForgeReport::Status s) {
  switch (s) {
    case ForgeReport::Status::Solved:
      return "solved";
    case ForgeReport::Status::Refuted:
      return "refuted";
    case ForgeReport::Status::NoSolution:
      return "no-solution";
    case ForgeReport::Status::Timeout:
      return "timeout";
    default:
      return "error";
  }
}

int status_exit_code(ForgeReport::Status s) {
  switch (s) {
    case ForgeReport::Status::Solved:
      return 0;
    case ForgeReport::Status::Refuted:
    case ForgeReport::Status::NoSolution:
      return 2;
    case ForgeReport::Status::Timeout:
      return 3;
    default:
      return 1;
  }
}

ExprPtr root_filling(const Solution& sol, HoleId h) {
  if (const ExprPtr* e = sol.filling.find(h)) return sol.filling.substitute(*e);
  return e_hole(h);
}

namespace {

bool has_self_reference(const ExprPtr& e) {
  if (auto* f = std::get_if<EFix>(&e->node)) {
    if (!f->fname.empty() && expr_free_in(f->body, f->fname)) return true;
    return has_self_reference(f->body);
  }
  bool found = false;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EApp>) {
          found = has_self_reference(n.fn) || has_self_reference(n.arg);
        } else if constexpr (std::is_same_v<T, EPair>) {
          found = has_self_reference(n.fst) || has_self_reference(n.snd);
        } else if constexpr (std::is_same_v<T, EProj>) {
          found = has_self_reference(n.arg);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          found = has_self_reference(n.arg);
        } else if constexpr (std::is_same_v<T, ECase>) {
          found = has_self_reference(n.scrutinee);
          for (auto& b : n.branches) found = found || has_self_reference(b.body);
        }
      },
      e->node);
  return found;
}

void collect_var_names(const ExprPtr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EVar>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, EFix>) {
          collect_var_names(n.body, out);
        } else if constexpr (std::is_same_v<T, EApp>) {
          collect_var_names(n.fn, out);
          collect_var_names(n.arg, out);
        } else if constexpr (std::is_same_v<T, EPair>) {
          collect_var_names(n.fst, out);
          collect_var_names(n.snd, out);
        } else if constexpr (std::is_same_v<T, EProj>) {
          collect_var_names(n.arg, out);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          collect_var_names(n.arg, out);
        } else if constexpr (std::is_same_v<T, ECase>) {
          collect_var_names(n.scrutinee, out);
          for (auto& b : n.branches) collect_var_names(b.body, out);
        }
      },
      e->node);
}

}  // namespace

bool solution_is_recursive(const Elaborated& elab, const Solution& sol) {
  for (auto& [h, ct] : elab.delta) {
    ExprPtr filled = root_filling(sol, h);
    if (has_self_reference(filled)) return true;
    std::set<Ident> names;
    collect_var_names(filled, names);
    for (auto* b : ctx_visible(ct.ctx)) {
      if (b->rec_param && names.count(b->name)) return true;
    }
  }
  return false;
}

ForgeRun forge_source(const std::string& source, const ForgeOptions& opts) {
  ForgeRun run;
  auto started = std::chrono::steady_clock::now();
  auto finish = [&](ForgeReport::Status status, std::string error = "") {
    run.report.status = status;
    run.report.error = std::move(error);
    run.report.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return run;
  };

  Elaborated elab;
  try {
    SourceFile prelude = load_prelude();
    SourceFile file = parse(source);
    elab = desugar(file, prelude);
  } catch (const ParseError& e) {
    return finish(ForgeReport::Status::Error, e.to_string());
  } catch (const ElabError& e) {
    return finish(ForgeReport::Status::Error, e.to_string());
  }
  run.elab = elab;

  Checker checker(elab.delta, elab.sigma);
  TypeError terr;
  if (!checker.check_program(elab.program, &terr)) {
    return finish(ForgeReport::Status::Error, "type error: " + terr.to_string());
  }

  // Constraint collection.
  std::vector<Constraints> k0s;
  try {
    EvalCtx ectx(std::max<long>(opts.solver.fuel, 10000));
    auto evaluated = eval_program(elab.program, ectx);
    if (auto* bad = std::get_if<Inconsistent>(&evaluated)) {
      return finish(ForgeReport::Status::Refuted, bad->detail);
    }
    run.assertions = std::get<ProgramEval>(evaluated).asserts;

    QueryCtx q{elab.delta, elab.sigma, opts.solver.uneval, EvalCtx(opts.solver.fuel)};
    simplify_assertions(q, run.assertions, [&](const Constraints& k) {
      k0s.push_back(k);
      return k0s.size() >= opts.solver.max_initial_constraints;
    });
  } catch (const FuelExhausted&) {
    if (k0s.empty())
      return finish(ForgeReport::Status::Error, "fuel exhausted while collecting constraints");
  }
  if (k0s.empty()) {
    return finish(ForgeReport::Status::Refuted, "assertions cannot be satisfied");
  }

  if (run.assertions.empty()) {
    // Nothing to constrain the holes; a hole-free program is trivially solved.
    bool holes = !elab.delta.empty();
    if (!holes) {
      run.report.solutions.push_back(SolutionReport{{}, 0, false});
      return finish(ForgeReport::Status::Solved);
    }
  }

  Solver solver(elab.sigma, elab.delta, opts.solver);
  size_t max_solutions = opts.max_solutions ? opts.max_solutions : opts.top_n;
  std::function<bool(const Solution&)> stop_when;
  if (opts.only_recursive) {
    max_solutions = std::max<size_t>(max_solutions, 16);
    stop_when = [&](const Solution& s) { return solution_is_recursive(elab, s); };
  }
  Solver::Outcome outcome = solver.run(k0s, elab.hole_case_depth, max_solutions, stop_when);

  if (outcome.solutions.empty()) {
    return finish(outcome.timed_out ? ForgeReport::Status::Timeout
                                    : ForgeReport::Status::NoSolution,
                  outcome.timed_out ? "search timed out" : "search space exhausted");
  }

  if (opts.check_solutions) {
    for (auto& sol : outcome.solutions) {
      HoleContext full = elab.delta;
      for (auto& [h, ct] : sol.new_holes) full.emplace(h, ct);
      Checker final_checker(full, elab.sigma);
      Constraints as_constraints;
      as_constraints.filling = sol.filling;
      if (auto err = final_checker.check_constraints(as_constraints)) {
        return finish(ForgeReport::Status::Error,
                      "solution fails to type check: " + err->to_string());
      }
      try {
        QueryCtx q{full, elab.sigma, opts.solver.uneval,
                   EvalCtx(std::max<long>(opts.solver.fuel, 10000))};
        if (!assertion_satisfaction(q, sol.filling, run.assertions)) {
          return finish(ForgeReport::Status::Error, "solution fails the assertions");
        }
      } catch (const FuelExhausted&) {
        return finish(ForgeReport::Status::Error, "solution diverges on the assertions");
      }
    }
  }

  run.ranked = rank(outcome.solutions);
  run.report.stage = outcome.stage_index;
  for (auto& sol : run.ranked) {
    SolutionReport sr;
    sr.total_size = sol.total_size;
    sr.recursive = solution_is_recursive(elab, sol);
    for (auto& [h, ct] : elab.delta) {
      sr.fillings.emplace_back(h, pretty(root_filling(sol, h)));
    }
    run.report.solutions.push_back(std::move(sr));
    if (run.report.solutions.size() >= opts.top_n) break;
  }
  return finish(ForgeReport::Status::Solved);
}

}  // namespace smyth
