#include "smyth/constraints.hpp"

namespace smyth {

std::optional<HoleFilling> merge_fillings(const HoleFilling& a, const HoleFilling& b,
                                          HoleId* conflict) {
  HoleFilling out = a;
  for (auto& [h, e] : b.entries()) {
    if (const ExprPtr* existing = out.find(h)) {
      if (!expr_equal(*existing, e)) {
        if (conflict) *conflict = h;
        return std::nullopt;
      }
    } else {
      out.bind(h, e);
    }
  }
  return out;
}

Unfilled merge_unfilled(const Unfilled& a, const Unfilled& b) {
  Unfilled out = a;
  for (auto& [h, worlds] : b) {
    unfilled_add(out, h, worlds);
  }
  return out;
}

std::optional<Constraints> merge_syntactic(const Constraints& a, const Constraints& b,
                                           HoleId* conflict) {
  auto filling = merge_fillings(a.filling, b.filling, conflict);
  if (!filling) return std::nullopt;
  return Constraints{std::move(*filling), merge_unfilled(a.unfilled, b.unfilled)};
}

namespace {

constexpr int kMergeStepCap = 100;

bool is_deferred(const HoleFilling& f, HoleId h) {
  const ExprPtr* e = f.find(h);
  if (!e) return false;
  auto* hole = std::get_if<EHole>(&(*e)->node);
  return hole && hole->hole == h;
}

// One Step: every unfilled entry is resolved against the filling; the
// per-entry streams are combined and merged with (F, -).
bool merge_step(QueryCtx& q, const Constraints& k, const KSink& sink) {
  std::vector<std::pair<HoleId, const std::vector<World>*>> entries;
  entries.reserve(k.unfilled.size());
  for (auto& [h, worlds] : k.unfilled) entries.emplace_back(h, &worlds);

  std::function<bool(size_t, const Constraints&)> rec = [&](size_t i,
                                                            const Constraints& acc) -> bool {
    if (i == entries.size()) return sink(acc);
    auto [h, worlds] = entries[i];
    const ExprPtr* filled = k.filling.find(h);
    if (!filled) {
      Constraints unresolved;
      unfilled_add(unresolved.unfilled, h, *worlds);
      auto merged = merge_syntactic(acc, unresolved);
      return merged ? rec(i + 1, *merged) : false;
    }
    if (is_deferred(k.filling, h)) {
      // A deferred hole only tolerates top constraints.
      for (auto& w : *worlds) {
        if (!is_top(w.ex)) return false;
      }
      return rec(i + 1, acc);
    }
    return live_check(q, k.filling, *filled, *worlds, [&](const Constraints& kk) {
      auto merged = merge_syntactic(acc, kk);
      return merged ? rec(i + 1, *merged) : false;
    });
  };

  Constraints base;
  base.filling = k.filling;
  return rec(0, base);
}

bool merge_fix(QueryCtx& q, const Constraints& k, int steps, const KSink& sink) {
  if (steps >= kMergeStepCap) return false;  // diverging merge; treat as refuted
  return merge_step(q, k, [&](const Constraints& next) {
    if (constraints_equal(next, k)) return sink(next);
    return merge_fix(q, next, steps + 1, sink);
  });
}

}  // namespace

bool merge_semantic(QueryCtx& q, const Constraints& k, const KSink& sink) {
  return merge_fix(q, k, 0, sink);
}

bool satisfies_constraints(QueryCtx& q, const HoleFilling& filling, const Constraints& k) {
  for (auto& [h, e] : k.filling.entries()) {
    const ExprPtr* mine = filling.find(h);
    if (!mine || !expr_equal(*mine, e)) return false;
  }
  for (auto& [h, worlds] : k.unfilled) {
    for (auto& w : worlds) {
      ResultPtr r = live_eval(w.env, filling, e_hole(h), q.eval);
      if (!satisfies(q, filling, r, w.ex)) return false;
    }
  }
  return true;
}

}  // namespace smyth
