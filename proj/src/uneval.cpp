#include "smyth/uneval.hpp"

#include "smyth/constraints.hpp"

namespace smyth {

bool satisfies(QueryCtx& q, const HoleFilling& filling, const ResultPtr& r,
               const ExamplePtr& ex) {
  if (is_top(ex)) return true;  // XS-Top
  if (std::holds_alternative<XUnit>(ex->node)) {
    return std::holds_alternative<RUnit>(r->node);
  }
  if (auto* xp = std::get_if<XPair>(&ex->node)) {
    auto* rp = std::get_if<RPair>(&r->node);
    return rp && satisfies(q, filling, rp->fst, xp->fst) &&
           satisfies(q, filling, rp->snd, xp->snd);
  }
  if (auto* xc = std::get_if<XCtor>(&ex->node)) {
    auto* rc = std::get_if<RCtor>(&r->node);
    return rc && rc->ctor == xc->ctor && satisfies(q, filling, rc->arg, xc->arg);
  }
  auto* io = std::get_if<XInputOutput>(&ex->node);
  ResultPtr applied = apply_result(filling, r, value_to_result(io->input), q.eval);
  return satisfies(q, filling, applied, io->output);
}

std::optional<HoleId> blocking_hole(const ResultPtr& r) {
  if (auto* h = std::get_if<RHoleClosure>(&r->node)) return h->hole;
  if (auto* a = std::get_if<RApp>(&r->node)) return blocking_hole(a->fn);
  if (auto* p = std::get_if<RProj>(&r->node)) return blocking_hole(p->arg);
  if (auto* c = std::get_if<RCaseClosure>(&r->node)) return blocking_hole(c->scrutinee);
  if (auto* i = std::get_if<RInverseCtor>(&r->node)) return blocking_hole(i->arg);
  return std::nullopt;
}

bool scrutinee_guesses(QueryCtx& q, const ResultPtr& scrutinee, const FillingSink& sink) {
  auto hole = blocking_hole(scrutinee);
  if (!hole) return false;
  auto it = q.delta.find(*hole);
  if (it == q.delta.end()) return false;
  const ContextualType& ct = it->second;

  auto try_candidate = [&](ExprPtr cand) -> bool {
    HoleFilling f;
    f.bind(*hole, std::move(cand));
    ResultPtr resumed = resume(f, scrutinee, q.eval);
    if (!std::holds_alternative<RCtor>(resumed->node)) return false;
    return sink(f);
  };

  auto visible = ctx_visible(ct.ctx);
  for (auto* b : visible) {
    if (b->name == "_") continue;
    if (type_equal(b->type, ct.type)) {
      if (try_candidate(e_var(b->name))) return true;
    }
  }
  for (auto* b : visible) {
    if (b->name == "_") continue;
    if (auto* p = as_pair_type(b->type)) {
      if (type_equal(p->fst, ct.type)) {
        if (try_candidate(e_proj(1, e_var(b->name)))) return true;
      }
      if (type_equal(p->snd, ct.type)) {
        if (try_candidate(e_proj(2, e_var(b->name)))) return true;
      }
    }
  }
  return false;
}

namespace {

const CaseBranch* branch_for(const std::vector<CaseBranch>& branches, const Ident& ctor) {
  for (auto& b : branches) {
    if (b.ctor == ctor) return &b;
  }
  return nullptr;
}

struct Unevaluator {
  QueryCtx& q;

  bool go(const HoleFilling& filling, const ResultPtr& r, const ExamplePtr& ex,
          int lazy_used, const KSink& sink) {
    if (is_top(ex)) return sink(Constraints{});  // U-Top

    if (std::holds_alternative<XUnit>(ex->node)) {
      if (std::holds_alternative<RUnit>(r->node)) return sink(Constraints{});  // U-Unit
      // fall through to indeterminate handling below
    }

    if (auto* xp = std::get_if<XPair>(&ex->node)) {
      if (auto* rp = std::get_if<RPair>(&r->node)) {  // U-Pair
        return go(filling, rp->fst, xp->fst, lazy_used, [&](const Constraints& k1) {
          return go(filling, rp->snd, xp->snd, lazy_used, [&](const Constraints& k2) {
            auto merged = merge_syntactic(k1, k2);
            return merged ? sink(*merged) : false;
          });
        });
      }
    }

    if (auto* xc = std::get_if<XCtor>(&ex->node)) {
      if (auto* rc = std::get_if<RCtor>(&r->node)) {  // U-Ctor
        if (rc->ctor != xc->ctor) return false;
        return go(filling, rc->arg, xc->arg, lazy_used, sink);
      }
    }

    if (auto* io = std::get_if<XInputOutput>(&ex->node)) {
      if (auto* rf = std::get_if<RFix>(&r->node)) {  // U-Fix
        EnvPtr env = rf->fname.empty() ? rf->env : env_bind(rf->env, rf->fname, r);
        env = env_bind(env, rf->param, value_to_result(io->input));
        ResultPtr body = live_eval(env, filling, rf->body, q.eval);
        return go(filling, body, io->output, lazy_used, sink);
      }
    }

    if (auto* h = std::get_if<RHoleClosure>(&r->node)) {  // U-Hole
      Constraints k;
      unfilled_add(k.unfilled, h->hole, {World{h->env, ex}});
      return sink(k);
    }
    if (auto* a = std::get_if<RApp>(&r->node)) {  // U-App
      auto v = result_to_value(a->arg);
      if (!v) return false;  // no rule for non-simple arguments
      return go(filling, a->fn, x_io(*v, ex), lazy_used, sink);
    }
    if (auto* p = std::get_if<RProj>(&r->node)) {  // U-Prj-1 / U-Prj-2
      ExamplePtr pair_ex = p->index == 1 ? x_pair(ex, x_top()) : x_pair(x_top(), ex);
      return go(filling, p->arg, pair_ex, lazy_used, sink);
    }
    if (auto* i = std::get_if<RInverseCtor>(&r->node)) {  // U-Inverse-Ctor
      return go(filling, i->arg, x_ctor(i->ctor, ex), lazy_used, sink);
    }
    if (std::holds_alternative<RCaseClosure>(r->node)) {
      return case_closure(filling, r, ex, lazy_used, sink);
    }
    return false;  // refuted
  }

  bool case_closure(const HoleFilling& filling, const ResultPtr& r, const ExamplePtr& ex,
                    int lazy_used, const KSink& sink) {
    auto* m = std::get_if<RCaseClosure>(&r->node);

    // U-Case-Guess: eagerly resolve the branch by guessing a filling for the
    // hole blocking the scrutinee.
    bool stopped = scrutinee_guesses(q, m->scrutinee, [&](const HoleFilling& guess) {
      auto combined = merge_fillings(filling, guess);
      if (!combined) return false;
      ResultPtr resumed = resume(*combined, m->scrutinee, q.eval);
      auto* ctor = std::get_if<RCtor>(&resumed->node);
      if (!ctor) return false;
      const CaseBranch* b = branch_for(m->branches, ctor->ctor);
      if (!b) return false;
      EnvPtr env = env_bind(m->env, b->binder, ctor->arg);
      ResultPtr body = live_eval(env, *combined, b->body, q.eval);
      Constraints guessed;
      guessed.filling = guess;
      return go(*combined, body, ex, lazy_used, [&](const Constraints& k) {
        auto merged = merge_syntactic(guessed, k);
        return merged ? sink(*merged) : false;
      });
    });
    if (stopped) return true;

    // Lazy U-Case, bounded nesting, branches in declaration order.
    if (lazy_used >= q.cfg.max_lazy_case) return false;
    for (auto& b : m->branches) {
      bool aborted =
          go(filling, m->scrutinee, x_ctor(b.ctor, x_top()), lazy_used + 1,
             [&](const Constraints& k1) {
               EnvPtr env = env_bind(m->env, b.binder, r_inverse_ctor(b.ctor, m->scrutinee));
               ResultPtr body = live_eval(env, filling, b.body, q.eval);
               return go(filling, body, ex, lazy_used + 1, [&](const Constraints& k2) {
                 auto merged = merge_syntactic(k1, k2);
                 return merged ? sink(*merged) : false;
               });
             });
      if (aborted) return true;
    }
    return false;
  }
};

}  // namespace

bool uneval(QueryCtx& q, const HoleFilling& filling, const ResultPtr& r,
            const ExamplePtr& ex, const KSink& sink) {
  Unevaluator u{q};
  return u.go(filling, r, ex, 0, sink);
}

bool live_check(QueryCtx& q, const HoleFilling& filling, const ExprPtr& e,
                const std::vector<World>& worlds, const KSink& sink) {
  std::vector<ResultPtr> results;
  results.reserve(worlds.size());
  for (auto& w : worlds) {
    results.push_back(live_eval(w.env, filling, e, q.eval));
  }
  Unevaluator u{q};
  std::function<bool(size_t, const Constraints&)> product =
      [&](size_t i, const Constraints& acc) -> bool {
    if (i == worlds.size()) return sink(acc);
    return u.go(filling, results[i], worlds[i].ex, 0, [&](const Constraints& k) {
      auto merged = merge_syntactic(acc, k);
      if (!merged) return false;  // conflicting branch choice; try next
      return product(i + 1, *merged);
    });
  };
  return product(0, Constraints{});
}

}  // namespace smyth
