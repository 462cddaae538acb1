#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smyth/ast.hpp"

namespace smyth {

// ---------------------------------------------------------------------------
// Results and environments
// ---------------------------------------------------------------------------

struct Result;
using ResultPtr = std::shared_ptr<const Result>;

struct Env;
using EnvPtr = std::shared_ptr<const Env>;  // nullptr = empty environment

struct Env {
  EnvPtr tail;
  Ident name;
  ResultPtr value;
};

EnvPtr env_bind(const EnvPtr& env, Ident name, ResultPtr value);
const ResultPtr* env_lookup(const EnvPtr& env, const Ident& name);
bool env_equal(const EnvPtr& a, const EnvPtr& b);
// Outermost-first (oldest binding first).
std::vector<const Env*> env_to_vector(const EnvPtr& env);
size_t env_length(const EnvPtr& env);

struct RFix {
  EnvPtr env;
  Ident fname;
  Ident param;
  TypePtr ann;  // may be null
  ExprPtr body;
};
struct RUnit {};
struct RPair {
  ResultPtr fst;
  ResultPtr snd;
};
struct RCtor {
  Ident ctor;
  ResultPtr arg;
};
struct RHoleClosure {
  EnvPtr env;
  HoleId hole;
};
struct RApp {
  ResultPtr fn;   // indeterminate
  ResultPtr arg;  // final
};
struct RProj {
  int index;
  ResultPtr arg;  // indeterminate
};
struct RCaseClosure {
  EnvPtr env;
  ResultPtr scrutinee;  // indeterminate
  std::vector<CaseBranch> branches;
};
struct RInverseCtor {
  Ident ctor;
  ResultPtr arg;
};

struct Result {
  std::variant<RFix, RUnit, RPair, RCtor, RHoleClosure, RApp, RProj, RCaseClosure,
               RInverseCtor>
      node;
};

ResultPtr r_fix(EnvPtr env, Ident fname, Ident param, TypePtr ann, ExprPtr body);
ResultPtr r_unit();
ResultPtr r_pair(ResultPtr fst, ResultPtr snd);
ResultPtr r_ctor(Ident ctor, ResultPtr arg);
ResultPtr r_hole(EnvPtr env, HoleId hole);
ResultPtr r_app(ResultPtr fn, ResultPtr arg);
ResultPtr r_proj(int index, ResultPtr arg);
ResultPtr r_case(EnvPtr env, ResultPtr scrutinee, std::vector<CaseBranch> branches);
ResultPtr r_inverse_ctor(Ident ctor, ResultPtr arg);

enum class ResultClass { Determinate, Indeterminate };

// Total on final results; inverse constructor applications (which only arise
// inside unevaluation) count as indeterminate.
ResultClass classify(const ResultPtr& r);
inline bool is_determinate(const ResultPtr& r) {
  return classify(r) == ResultClass::Determinate;
}
inline bool is_indeterminate(const ResultPtr& r) {
  return classify(r) == ResultClass::Indeterminate;
}

bool result_equal(const ResultPtr& a, const ResultPtr& b);

// ---------------------------------------------------------------------------
// Simple (first-order) values
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct VUnit {};
struct VPair {
  ValuePtr fst;
  ValuePtr snd;
};
struct VCtor {
  Ident ctor;
  ValuePtr arg;
};

struct Value {
  std::variant<VUnit, VPair, VCtor> node;
};

ValuePtr v_unit();
ValuePtr v_pair(ValuePtr fst, ValuePtr snd);
ValuePtr v_ctor(Ident ctor, ValuePtr arg);

bool value_equal(const ValuePtr& a, const ValuePtr& b);

// Downcast r to a simple value; fails when any closure or indeterminate node
// is present.
std::optional<ValuePtr> result_to_value(const ResultPtr& r);
ResultPtr value_to_result(const ValuePtr& v);
ExprPtr value_to_expr(const ValuePtr& v);

// ---------------------------------------------------------------------------
// Examples
// ---------------------------------------------------------------------------

struct Example;
using ExamplePtr = std::shared_ptr<const Example>;

struct XUnit {};
struct XPair {
  ExamplePtr fst;
  ExamplePtr snd;
};
struct XCtor {
  Ident ctor;
  ExamplePtr arg;
};
struct XInputOutput {
  ValuePtr input;
  ExamplePtr output;
};
struct XTop {};

struct Example {
  std::variant<XUnit, XPair, XCtor, XInputOutput, XTop> node;
};

ExamplePtr x_unit();
ExamplePtr x_pair(ExamplePtr fst, ExamplePtr snd);
ExamplePtr x_ctor(Ident ctor, ExamplePtr arg);
ExamplePtr x_io(ValuePtr input, ExamplePtr output);
ExamplePtr x_top();

bool example_equal(const ExamplePtr& a, const ExamplePtr& b);
inline bool is_top(const ExamplePtr& ex) { return std::holds_alternative<XTop>(ex->node); }
ExamplePtr value_to_example(const ValuePtr& v);
// Succeeds when the example contains no Top and no input-output nodes.
std::optional<ValuePtr> example_to_value(const ExamplePtr& ex);

// ---------------------------------------------------------------------------
// Worlds, hole fillings, constraints
// ---------------------------------------------------------------------------

struct World {
  EnvPtr env;
  ExamplePtr ex;
};

bool world_equal(const World& a, const World& b);
std::vector<World> filter_worlds(const std::vector<World>& worlds);

class HoleFilling {
 public:
  HoleFilling() = default;

  bool contains(HoleId h) const { return map_.count(h) != 0; }
  const ExprPtr* find(HoleId h) const;
  void bind(HoleId h, ExprPtr e) { map_[h] = std::move(e); }
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  const std::map<HoleId, ExprPtr>& entries() const { return map_; }

  // Deep substitution of hole bindings into an expression; self-deferred
  // bindings (h -> ??h) are left as holes.
  ExprPtr substitute(const ExprPtr& e) const;

 private:
  std::map<HoleId, ExprPtr> map_;
};

bool filling_equal(const HoleFilling& a, const HoleFilling& b);

// Unfilled-hole example contexts; empty world lists are never stored.
using Unfilled = std::map<HoleId, std::vector<World>>;

bool unfilled_equal(const Unfilled& a, const Unfilled& b);
// Appends worlds with structural duplicate suppression; no-op on empty input.
void unfilled_add(Unfilled& u, HoleId h, const std::vector<World>& worlds);

struct Constraints {
  HoleFilling filling;
  Unfilled unfilled;
};

bool constraints_equal(const Constraints& a, const Constraints& b);

// ---------------------------------------------------------------------------
// Hole type contexts and synthesis goals
// ---------------------------------------------------------------------------

struct ContextualType {
  TypeCtx ctx;
  TypePtr type;
};

using HoleContext = std::map<HoleId, ContextualType>;

struct Goal {
  HoleId hole;
  TypeCtx ctx;
  TypePtr type;
  std::vector<World> worlds;
};

}  // namespace smyth
