#pragma once

#include <optional>

#include "smyth/uneval.hpp"

namespace smyth {

// Union of fillings; overlapping bindings must be syntactically equal
// (binder names included; fillings for one hole share their context).
std::optional<HoleFilling> merge_fillings(const HoleFilling& a, const HoleFilling& b,
                                          HoleId* conflict = nullptr);

// Total: concatenates world lists with structural duplicate suppression.
Unfilled merge_unfilled(const Unfilled& a, const Unfilled& b);

std::optional<Constraints> merge_syntactic(const Constraints& a, const Constraints& b,
                                           HoleId* conflict = nullptr);

// Semantic merging: holes both filled and constrained are rechecked with
// live bidirectional example checking, iterated to a fixpoint. Streams every
// consistent resolution; empty when some filled hole refutes its examples.
bool merge_semantic(QueryCtx& q, const Constraints& k, const KSink& sink);

// F |= K: F extends K's filling and satisfies every constrained hole's worlds.
bool satisfies_constraints(QueryCtx& q, const HoleFilling& filling, const Constraints& k);

}  // namespace smyth
