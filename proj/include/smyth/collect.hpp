#pragma once

#include <variant>

#include "smyth/uneval.hpp"

namespace smyth {

struct Assertion {
  ResultPtr lhs;  // indeterminate
  ValuePtr rhs;
};

struct Inconsistent {
  std::string detail;
};

// Equality modulo assumptions about indeterminate results. Returns the
// assertions needed for the two results to agree, or nothing when they are
// irreconcilable.
std::variant<std::vector<Assertion>, Inconsistent> result_consistency(const ResultPtr& a,
                                                                      const ResultPtr& b);

struct ProgramEval {
  ResultPtr main;
  std::vector<Assertion> asserts;
};

// Evaluates main in the empty environment, then each assert side, collecting
// assertion predicates via result consistency.
std::variant<ProgramEval, Inconsistent> eval_program(const Program& p, EvalCtx& ctx);

// Simplify: unevaluates each assertion's left side against its value, merging
// the per-assertion constraint streams syntactically. Empty stream = refuted.
bool simplify_assertions(QueryCtx& q, const std::vector<Assertion>& asserts,
                         const KSink& sink);

// F |= A: every assertion's lhs resumes under F to exactly its rhs value.
bool assertion_satisfaction(QueryCtx& q, const HoleFilling& filling,
                            const std::vector<Assertion>& asserts);

}  // namespace smyth
