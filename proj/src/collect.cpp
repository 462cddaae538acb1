#include "smyth/collect.hpp"

#include "smyth/constraints.hpp"

namespace smyth {

namespace {

bool consistency_rec(const ResultPtr& a, const ResultPtr& b, std::vector<Assertion>& out,
                     std::string& why) {
  if (result_equal(a, b)) return true;  // RC-Refl
  auto* ap = std::get_if<RPair>(&a->node);
  auto* bp = std::get_if<RPair>(&b->node);
  if (ap && bp) {  // RC-Pair
    return consistency_rec(ap->fst, bp->fst, out, why) &&
           consistency_rec(ap->snd, bp->snd, out, why);
  }
  auto* ac = std::get_if<RCtor>(&a->node);
  auto* bc = std::get_if<RCtor>(&b->node);
  if (ac && bc) {  // RC-Ctor
    if (ac->ctor != bc->ctor) {
      why = "constructor mismatch: " + ac->ctor + " vs " + bc->ctor;
      return false;
    }
    return consistency_rec(ac->arg, bc->arg, out, why);
  }
  if (is_indeterminate(a)) {  // RC-Assert-1
    if (auto v = result_to_value(b)) {
      out.push_back(Assertion{a, *v});
      return true;
    }
  }
  if (is_indeterminate(b)) {  // RC-Assert-2
    if (auto v = result_to_value(a)) {
      out.push_back(Assertion{b, *v});
      return true;
    }
  }
  why = "no consistency rule applies";
  return false;
}

}  // namespace

std::variant<std::vector<Assertion>, Inconsistent> result_consistency(const ResultPtr& a,
                                                                      const ResultPtr& b) {
  std::vector<Assertion> out;
  std::string why;
  if (!consistency_rec(a, b, out, why)) return Inconsistent{why};
  return out;
}

std::variant<ProgramEval, Inconsistent> eval_program(const Program& p, EvalCtx& ctx) {
  ProgramEval out;
  out.main = eval(nullptr, p.main, ctx);
  // Assert sides are closed by construction, so no binding for main is needed
  // (and binding it would leak into hole closure environments).
  for (size_t i = 0; i < p.asserts.size(); ++i) {
    ResultPtr lhs = eval(nullptr, p.asserts[i].first, ctx);
    ResultPtr rhs = eval(nullptr, p.asserts[i].second, ctx);
    auto consistency = result_consistency(lhs, rhs);
    if (auto* bad = std::get_if<Inconsistent>(&consistency)) {
      bad->detail = "assert " + std::to_string(i + 1) + ": " + bad->detail;
      return *bad;
    }
    auto& assertions = std::get<std::vector<Assertion>>(consistency);
    out.asserts.insert(out.asserts.end(), assertions.begin(), assertions.end());
  }
  return out;
}

bool simplify_assertions(QueryCtx& q, const std::vector<Assertion>& asserts,
                         const KSink& sink) {
  HoleFilling empty;
  std::function<bool(size_t, const Constraints&)> rec = [&](size_t i,
                                                            const Constraints& acc) -> bool {
    if (i == asserts.size()) return sink(acc);
    return uneval(q, empty, asserts[i].lhs, value_to_example(asserts[i].rhs),
                  [&](const Constraints& k) {
                    auto merged = merge_syntactic(acc, k);
                    return merged ? rec(i + 1, *merged) : false;
                  });
  };
  return rec(0, Constraints{});
}

bool assertion_satisfaction(QueryCtx& q, const HoleFilling& filling,
                            const std::vector<Assertion>& asserts) {
  for (auto& a : asserts) {
    ResultPtr resumed = resume(filling, a.lhs, q.eval);
    auto v = result_to_value(resumed);
    if (!v || !value_equal(*v, a.rhs)) return false;
  }
  return true;
}

}  // namespace smyth
