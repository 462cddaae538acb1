#include "smyth/solve.hpp"

#include <algorithm>

namespace smyth {

std::vector<StageParams> stage_schedule() {
  return {
      {1, 0, 0}, {5, 0, 0}, {5, 1, 1}, {7, 1, 1}, {9, 3, 2}, {13, 6, 2},
  };
}

namespace {

int size_without_holes(const ExprPtr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EFix>) {
          return 1 + size_without_holes(n.body);
        } else if constexpr (std::is_same_v<T, EApp>) {
          return size_without_holes(n.fn) + size_without_holes(n.arg);
        } else if constexpr (std::is_same_v<T, EPair>) {
          return 1 + size_without_holes(n.fst) + size_without_holes(n.snd);
        } else if constexpr (std::is_same_v<T, EProj>) {
          return 1 + size_without_holes(n.arg);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          return 1 + size_without_holes(n.arg);
        } else if constexpr (std::is_same_v<T, ECase>) {
          int s = 1 + size_without_holes(n.scrutinee);
          for (auto& b : n.branches) s += size_without_holes(b.body);
          return s;
        } else if constexpr (std::is_same_v<T, EHole>) {
          return 0;
        } else {
          return 1;
        }
      },
      e->node);
}

}  // namespace

std::vector<Solution> rank(std::vector<Solution> solutions) {
  std::stable_sort(solutions.begin(), solutions.end(),
                   [](const Solution& a, const Solution& b) {
                     return a.total_size < b.total_size;
                   });
  return solutions;
}

Solver::Solver(const DatatypeContext& sigma, HoleContext delta, SolverOptions opts)
    : sigma_(sigma), delta_(std::move(delta)), opts_(std::move(opts)) {
  for (auto& [h, ct] : delta_) next_hole_ = std::max(next_hole_, h + 1);
  first_fresh_ = next_hole_;
  deadline_ = std::chrono::steady_clock::now() +
              std::chrono::microseconds(static_cast<long>(opts_.timeout_s * 1e6));
}

QueryCtx Solver::query() const {
  return QueryCtx{delta_, sigma_, opts_.uneval, EvalCtx(opts_.fuel, deadline_)};
}

HoleId Solver::fresh_hole(const TypeCtx& ctx, const TypePtr& type, int case_depth) {
  HoleId h = next_hole_++;
  delta_.emplace(h, ContextualType{ctx, type});
  depth_[h] = case_depth;
  return h;
}

Ident Solver::fresh_name(const TypeCtx& ctx, const std::string& base) const {
  for (int i = 1;; ++i) {
    Ident candidate = base + std::to_string(i);
    if (!ctx_lookup(ctx, candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Guessing
// ---------------------------------------------------------------------------

bool Solver::decreasing_first_arg(const TypeCtx& ctx, const Ident& rec_param,
                                  const ExprPtr& arg) const {
  // The argument must be a case binder marked structurally smaller than the
  // recursive parameter, possibly under a projection chain.
  const Expr* e = arg.get();
  while (auto* p = std::get_if<EProj>(&e->node)) e = p->arg.get();
  auto* v = std::get_if<EVar>(&e->node);
  if (!v) return false;
  const TypeBinding* b = ctx_lookup(ctx, v->name);
  return b && b->decreasing_of && *b->decreasing_of == rec_param;
}

const std::vector<Solver::Typed>& Solver::elims(const TypeCtx& ctx, int size) {
  std::string key = ctx_fingerprint(ctx) + "#" + std::to_string(size);
  auto it = elim_cache_.find(key);
  if (it != elim_cache_.end()) return it->second;

  std::vector<Typed> out;
  if (size == 1) {
    for (auto* b : ctx_visible(ctx)) {
      if (b->name == "_") continue;
      out.push_back(Typed{b->type, e_var(b->name), true});
    }
  } else if (size > 1) {
    // Projections of smaller eliminations.
    for (auto& t : elims(ctx, size - 1)) {
      if (auto* p = as_pair_type(t.type)) {
        out.push_back(Typed{p->fst, e_proj(1, t.expr), false});
        out.push_back(Typed{p->snd, e_proj(2, t.expr), false});
      }
    }
    // Applications: function position is a variable or application spine.
    for (int fn_size = 1; fn_size < size; ++fn_size) {
      int arg_size = size - fn_size;
      auto& fns = elims(ctx, fn_size);
      for (size_t fi = 0; fi < fns.size(); ++fi) {
        const Typed& fn = fns[fi];
        if (!fn.appable) continue;
        auto* arrow = as_arrow(fn.type);
        if (!arrow) continue;
        const Ident* rec_param = nullptr;
        if (auto* v = std::get_if<EVar>(&fn.expr->node)) {
          const TypeBinding* b = ctx_lookup(ctx, v->name);
          if (b && b->rec_param) rec_param = &*b->rec_param;
        }
        for (auto& arg : elims(ctx, arg_size)) {
          if (!type_equal(arg.type, arrow->dom)) continue;
          if (rec_param && !decreasing_first_arg(ctx, *rec_param, arg.expr)) continue;
          out.push_back(Typed{arrow->cod, e_app(fn.expr, arg.expr), true});
        }
      }
    }
  }
  return elim_cache_.emplace(std::move(key), std::move(out)).first->second;
}

bool Solver::guess(const TypeCtx& ctx, const TypePtr& type, int size_budget,
                   const ExprSink& sink) {
  for (int size = 1; size <= size_budget; ++size) {
    if (std::chrono::steady_clock::now() > deadline_) throw SearchTimeout{};
    for (auto& t : elims(ctx, size)) {
      if (!type_equal(t.type, type)) continue;
      if (sink(t.expr)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

std::optional<Refinement> Solver::refine(const TypeCtx& ctx, const std::vector<World>& worlds,
                                         const TypePtr& type) {
  std::vector<World> filtered = filter_worlds(worlds);

  if (is_unit_type(type)) {
    for (auto& w : filtered) {
      if (!std::holds_alternative<XUnit>(w.ex->node)) return std::nullopt;
    }
    return Refinement{e_unit(), {}};
  }

  if (filtered.empty()) return std::nullopt;

  if (auto* pt = as_pair_type(type)) {
    std::vector<World> firsts, seconds;
    for (auto& w : filtered) {
      auto* p = std::get_if<XPair>(&w.ex->node);
      if (!p) return std::nullopt;
      firsts.push_back(World{w.env, p->fst});
      seconds.push_back(World{w.env, p->snd});
    }
    HoleId h1 = fresh_hole(ctx, pt->fst, 0);
    HoleId h2 = fresh_hole(ctx, pt->snd, 0);
    return Refinement{e_pair(e_hole(h1), e_hole(h2)),
                      {Goal{h1, ctx, pt->fst, std::move(firsts)},
                       Goal{h2, ctx, pt->snd, std::move(seconds)}}};
  }

  if (auto* dt = as_data(type)) {
    const Ident* shared = nullptr;
    std::vector<World> stripped;
    for (auto& w : filtered) {
      auto* c = std::get_if<XCtor>(&w.ex->node);
      if (!c) return std::nullopt;
      if (shared && *shared != c->ctor) return std::nullopt;
      shared = &c->ctor;
      stripped.push_back(World{w.env, c->arg});
    }
    auto info = sigma_.ctor(*shared);
    if (!info || info->datatype != dt->name) return std::nullopt;
    HoleId h1 = fresh_hole(ctx, info->arg, 0);
    return Refinement{e_ctor(*shared, e_hole(h1)),
                      {Goal{h1, ctx, info->arg, std::move(stripped)}}};
  }

  if (auto* arrow = as_arrow(type)) {
    for (auto& w : filtered) {
      if (!std::holds_alternative<XInputOutput>(w.ex->node)) return std::nullopt;
    }
    Ident fname = fresh_name(ctx, "f");
    Ident param = fresh_name(ctx, "x");
    TypeCtx inner = ctx_bind(ctx, TypeBinding{fname, type, param, {}, false});
    inner = ctx_bind(inner, TypeBinding{param, arrow->dom, {}, {}, true});
    HoleId h1 = fresh_hole(inner, arrow->cod, 0);
    ExprPtr body = e_hole(h1);
    ExprPtr sketch = e_fix(fname, param, type, body);
    std::vector<World> body_worlds;
    for (auto& w : filtered) {
      auto* io = std::get_if<XInputOutput>(&w.ex->node);
      EnvPtr env = env_bind(w.env, fname, r_fix(w.env, fname, param, type, body));
      env = env_bind(env, param, value_to_result(io->input));
      body_worlds.push_back(World{std::move(env), io->output});
    }
    return Refinement{sketch, {Goal{h1, inner, arrow->cod, std::move(body_worlds)}}};
  }

  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Branching
// ---------------------------------------------------------------------------

namespace {

// simplify(C^-1 r): unwrap a matching constructor application directly.
ResultPtr inverse_arg(const Ident& ctor, const ResultPtr& r) {
  if (auto* c = std::get_if<RCtor>(&r->node); c && c->ctor == ctor) return c->arg;
  return r_inverse_ctor(ctor, r);
}

const Expr* proj_root(const ExprPtr& e) {
  const Expr* p = e.get();
  while (auto* pr = std::get_if<EProj>(&p->node)) p = pr->arg.get();
  return p;
}

}  // namespace

bool Solver::branch(const HoleFilling& filling, const TypeCtx& ctx,
                    const std::vector<World>& worlds, const TypePtr& type,
                    const StageParams& stage, const BranchSink& sink) {
  if (stage.max_scrutinee_size <= 0) return false;
  std::vector<World> filtered = filter_worlds(worlds);

  for (auto& [dt_name, ctors] : sigma_.datatypes()) {
    TypePtr dt = t_data(dt_name);
    bool aborted = guess(ctx, dt, stage.max_scrutinee_size, [&](const ExprPtr& scrutinee) {
      // Per-world branch choices: forced for determinate scrutinee results,
      // validated by example checking for indeterminate ones.
      struct Choice {
        size_t ctor_index;
        Constraints k;
        ResultPtr binder_value;
      };
      std::vector<std::vector<Choice>> choices(filtered.size());
      for (size_t j = 0; j < filtered.size(); ++j) {
        ResultPtr r;
        try {
          EvalCtx ectx(opts_.fuel, deadline_);
          r = live_eval(filtered[j].env, filling, scrutinee, ectx);
        } catch (const FuelExhausted&) {
          return false;  // skip this scrutinee
        }
        if (auto* c = std::get_if<RCtor>(&r->node)) {
          for (size_t i = 0; i < ctors.size(); ++i) {
            if (ctors[i].name == c->ctor) {
              choices[j].push_back(Choice{i, Constraints{}, c->arg});
              break;
            }
          }
          if (choices[j].empty()) return false;  // foreign constructor; skip
        } else {
          for (size_t i = 0; i < ctors.size(); ++i) {
            std::vector<World> want{World{filtered[j].env, x_ctor(ctors[i].name, x_top())}};
            size_t taken = 0;
            try {
              QueryCtx q = query();
              live_check(q, filling, scrutinee, want, [&](const Constraints& k) {
                choices[j].push_back(Choice{i, k, inverse_arg(ctors[i].name, r)});
                return ++taken >= 4;  // a few constraint sets per (world, constructor)
              });
            } catch (const FuelExhausted&) {
            }
          }
          if (choices[j].empty()) return false;  // scrutinee cannot take any branch
        }
      }

      // Structural-decrease bookkeeping for the branch binders.
      std::optional<Ident> dec;
      if (auto* v = std::get_if<EVar>(&proj_root(scrutinee)->node)) {
        const TypeBinding* b = ctx_lookup(ctx, v->name);
        if (b) {
          if (b->decreasing_of) {
            dec = b->decreasing_of;
          } else if (b->is_formal) {
            dec = v->name;
          }
        }
      }
      Ident binder;
      if (auto* v = std::get_if<EVar>(&scrutinee->node)) {
        binder = v->name + "'";
        while (ctx_lookup(ctx, binder)) binder += "'";
      } else {
        binder = fresh_name(ctx, "w");
      }

      // Cross product of per-world choices, capped per scrutinee.
      int combos = 0;
      bool sink_stop = false;
      std::vector<size_t> pick(filtered.size(), 0);
      std::function<bool(size_t, const Constraints&)> enumerate =
          [&](size_t j, const Constraints& acc) -> bool {
        if (j == filtered.size()) {
          if (++combos > opts_.max_branch_combos) return true;  // cap reached
          std::vector<std::vector<World>> per_ctor(ctors.size());
          for (size_t i = 0; i < filtered.size(); ++i) {
            const Choice& c = choices[i][pick[i]];
            EnvPtr env = env_bind(filtered[i].env, binder, c.binder_value);
            per_ctor[c.ctor_index].push_back(World{std::move(env), filtered[i].ex});
          }
          std::vector<CaseBranch> branches;
          std::vector<Goal> goals;
          for (size_t i = 0; i < ctors.size(); ++i) {
            TypeCtx inner =
                ctx_bind(ctx, TypeBinding{binder, ctors[i].arg, {}, dec, false});
            HoleId h = fresh_hole(inner, type, 0);  // depth set by fill
            branches.push_back(CaseBranch{ctors[i].name, binder, e_hole(h)});
            goals.push_back(Goal{h, inner, type, std::move(per_ctor[i])});
          }
          BranchCandidate cand{e_case(scrutinee, std::move(branches)), std::move(goals), acc};
          if (sink(cand)) {
            sink_stop = true;
            return true;
          }
          return false;
        }
        for (size_t c = 0; c < choices[j].size(); ++c) {
          pick[j] = c;
          auto merged = merge_syntactic(acc, choices[j][c].k);
          if (!merged) continue;
          if (enumerate(j + 1, *merged)) return true;
        }
        return false;
      };
      enumerate(0, Constraints{});
      return sink_stop;
    });
    if (aborted) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Hole synthesis
// ---------------------------------------------------------------------------

bool Solver::fill(HoleId hole, const HoleFilling& filling, const TypeCtx& ctx,
                  const std::vector<World>& worlds, const TypePtr& type,
                  const StageParams& stage, int case_depth, const FillSink& sink) {
  // Defer: every world is top.
  if (!worlds.empty()) {
    bool all_top = true;
    for (auto& w : worlds) {
      if (!is_top(w.ex)) {
        all_top = false;
        break;
      }
    }
    if (all_top) {
      FillResult defer;
      defer.constraints.filling.bind(hole, e_hole(hole));
      if (sink(defer)) return true;
    }
  }

  // Refine: example-directed introduction of one layer.
  if (auto refinement = refine(ctx, worlds, type)) {
    FillResult out;
    out.constraints.filling.bind(hole, refinement->expr);
    for (auto& g : refinement->goals) {
      depth_[g.hole] = case_depth;
      unfilled_add(out.constraints.unfilled, g.hole, g.worlds);
    }
    out.goals = std::move(refinement->goals);
    if (sink(out)) return true;
  }

  // Guess-and-check at the stage's term budget.
  bool aborted = guess(ctx, type, stage.max_term_size, [&](const ExprPtr& cand) {
    ++stats_.candidates_checked;
    HoleFilling tied = filling;
    tied.bind(hole, cand);
    try {
      QueryCtx q = query();
      return live_check(q, tied, cand, worlds, [&](const Constraints& k) {
        Constraints mine;
        mine.filling.bind(hole, cand);
        auto merged = merge_syntactic(mine, k);
        if (!merged) return false;
        FillResult out;
        out.constraints = std::move(*merged);
        return sink(out);
      });
    } catch (const FuelExhausted&) {
      return false;  // divergent candidate
    }
  });
  if (aborted) return true;

  // Branch, within the remaining match-depth budget.
  if (case_depth < stage.max_match_depth) {
    aborted = branch(filling, ctx, worlds, type, stage, [&](const BranchCandidate& cand) {
      Constraints mine;
      mine.filling.bind(hole, cand.expr);
      for (auto& g : cand.goals) {
        depth_[g.hole] = case_depth + 1;
        unfilled_add(mine.unfilled, g.hole, g.worlds);
      }
      auto merged = merge_syntactic(mine, cand.constraints);
      if (!merged) return false;
      FillResult out;
      out.constraints = std::move(*merged);
      out.goals = cand.goals;
      return sink(out);
    });
    if (aborted) return true;
  }

  return false;
}

// ---------------------------------------------------------------------------
// Solve loop
// ---------------------------------------------------------------------------

bool Solver::solve(const Constraints& k, const SolutionSink& sink) {
  if (std::chrono::steady_clock::now() > deadline_) throw SearchTimeout{};

  if (k.unfilled.empty()) {
    Solution sol;
    sol.filling = k.filling;
    for (auto& [h, e] : k.filling.entries()) {
      sol.total_size += size_without_holes(e);
      std::vector<HoleId> mentioned{h};
      collect_holes(e, mentioned);
      for (HoleId m : mentioned) {
        if (m >= first_fresh_) {
          auto it = delta_.find(m);
          if (it != delta_.end()) sol.new_holes.emplace(m, it->second);
        }
      }
    }
    return sink(sol);
  }

  HoleId hole = k.unfilled.begin()->first;
  const std::vector<World>& worlds = k.unfilled.begin()->second;
  auto delta_it = delta_.find(hole);
  if (delta_it == delta_.end()) return false;
  const ContextualType ct = delta_it->second;
  int case_depth = 0;
  if (auto it = depth_.find(hole); it != depth_.end()) case_depth = it->second;

  Constraints rest;
  rest.filling = k.filling;
  for (auto& [h, ws] : k.unfilled) {
    if (h != hole) rest.unfilled.emplace(h, ws);
  }

  return fill(hole, k.filling, ct.ctx, worlds, ct.type, stage_, case_depth,
              [&](const FillResult& fr) {
                auto merged = merge_syntactic(rest, fr.constraints);
                if (!merged) return false;
                try {
                  QueryCtx q = query();
                  return merge_semantic(q, *merged, [&](const Constraints& next) {
                    return solve(next, sink);
                  });
                } catch (const FuelExhausted&) {
                  ++stats_.merge_divergences;
                  return false;
                }
              });
}

Solver::Outcome Solver::run(const std::vector<Constraints>& k0s,
                            const std::map<HoleId, int>& hole_case_depths,
                            size_t max_solutions,
                            const std::function<bool(const Solution&)>& stop_when) {
  Outcome outcome;
  if (max_solutions == 0) return outcome;
  for (size_t stage_idx = 0; stage_idx < opts_.stages.size(); ++stage_idx) {
    stage_ = opts_.stages[stage_idx];
    depth_ = hole_case_depths;
    std::vector<Solution> collected;
    bool done = false;
    try {
      for (auto& k0 : k0s) {
        try {
          QueryCtx q = query();
          done = merge_semantic(q, k0, [&](const Constraints& k) {
            return solve(k, [&](const Solution& sol) {
              collected.push_back(sol);
              return collected.size() >= max_solutions || (stop_when && stop_when(sol));
            });
          });
        } catch (const FuelExhausted&) {
          continue;
        }
        if (done) break;
      }
    } catch (const SearchTimeout&) {
      outcome.timed_out = collected.empty();
    }
    if (!collected.empty()) {
      outcome.solutions = std::move(collected);
      outcome.stage_index = static_cast<int>(stage_idx);
      return outcome;
    }
    if (outcome.timed_out) return outcome;
  }
  return outcome;
}

}  // namespace smyth
