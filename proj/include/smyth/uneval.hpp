#pragma once

#include <functional>

#include "smyth/eval.hpp"
#include "smyth/result.hpp"

namespace smyth {

struct UnevalConfig {
  int max_lazy_case = 3;  // nesting bound for the lazy case rule
};

// Shared context for one unevaluation / checking query. Fuel is a single
// budget across the query's embedded evaluations and resumptions.
struct QueryCtx {
  const HoleContext& delta;
  const DatatypeContext& sigma;
  UnevalConfig cfg;
  EvalCtx eval;
};

using KSink = std::function<bool(const Constraints&)>;

// Ground-truth example satisfaction. Throws FuelExhausted on divergence.
bool satisfies(QueryCtx& q, const HoleFilling& filling, const ResultPtr& r,
               const ExamplePtr& ex);

// Live unevaluation: streams constraint sets sufficient for satisfaction.
// The sink returning true stops production early (propagated as the return
// value). An empty stream means the example is refuted.
bool uneval(QueryCtx& q, const HoleFilling& filling, const ResultPtr& r,
            const ExamplePtr& ex, const KSink& sink);

// Live bidirectional example checking: evaluates `e` in each world, unevaluates
// against the expected example, and merges per-world constraints syntactically.
bool live_check(QueryCtx& q, const HoleFilling& filling, const ExprPtr& e,
                const std::vector<World>& worlds, const KSink& sink);

// Candidate fillings for the hole blocking an indeterminate scrutinee, drawn
// from variables and single projections in the hole's recorded context. Only
// candidates that resume the scrutinee to a constructor application are
// yielded.
using FillingSink = std::function<bool(const HoleFilling&)>;
bool scrutinee_guesses(QueryCtx& q, const ResultPtr& scrutinee, const FillingSink& sink);

// The hole whose closure blocks an indeterminate result, if any.
std::optional<HoleId> blocking_hole(const ResultPtr& r);

}  // namespace smyth
