#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace smyth {

using Ident = std::string;
using HoleId = int;

// ---------------------------------------------------------------------------
// Types: T ::= T1 -> T2 | () | T1 * T2 | D
// ---------------------------------------------------------------------------

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct TArrow {
  TypePtr dom;
  TypePtr cod;
};
struct TUnit {};
struct TPair {
  TypePtr fst;
  TypePtr snd;
};
struct TData {
  Ident name;
};

struct TypeExpr {
  std::variant<TArrow, TUnit, TPair, TData> node;
};

TypePtr t_arrow(TypePtr dom, TypePtr cod);
TypePtr t_unit();
TypePtr t_pair(TypePtr fst, TypePtr snd);
TypePtr t_data(Ident name);

bool type_equal(const TypePtr& a, const TypePtr& b);
std::string show_type(const TypePtr& t);

inline const TArrow* as_arrow(const TypePtr& t) { return std::get_if<TArrow>(&t->node); }
inline const TPair* as_pair_type(const TypePtr& t) { return std::get_if<TPair>(&t->node); }
inline const TData* as_data(const TypePtr& t) { return std::get_if<TData>(&t->node); }
inline bool is_unit_type(const TypePtr& t) { return std::holds_alternative<TUnit>(t->node); }

// ---------------------------------------------------------------------------
// Datatype context: D has constructors C_i, each carrying one argument type.
// Constructor names are globally unique across datatypes.
// ---------------------------------------------------------------------------

struct CtorDef {
  Ident name;
  TypePtr arg;
};

class DatatypeContext {
 public:
  void declare(const Ident& datatype, std::vector<CtorDef> ctors);

  const std::vector<CtorDef>* lookup(const Ident& datatype) const;

  struct CtorInfo {
    Ident datatype;
    TypePtr arg;
    size_t index;  // position within the datatype's declaration
  };
  std::optional<CtorInfo> ctor(const Ident& ctor_name) const;

  const std::vector<std::pair<Ident, std::vector<CtorDef>>>& datatypes() const {
    return datatypes_;
  }

 private:
  std::vector<std::pair<Ident, std::vector<CtorDef>>> datatypes_;
  std::map<Ident, std::pair<size_t, size_t>> ctor_index_;  // ctor -> (dt idx, ctor idx)
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct EFix {
  Ident fname;   // self name; "_"-style names mark non-recursive lambdas
  Ident param;
  TypePtr ann;   // arrow type annotation, may be null
  ExprPtr body;
};
struct EApp {
  ExprPtr fn;
  ExprPtr arg;
};
struct EVar {
  Ident name;
};
struct EUnit {};
struct EPair {
  ExprPtr fst;
  ExprPtr snd;
};
struct EProj {
  int index;  // 1 or 2
  ExprPtr arg;
};
struct ECtor {
  Ident ctor;
  ExprPtr arg;
};
struct CaseBranch {
  Ident ctor;
  Ident binder;
  ExprPtr body;
};
struct ECase {
  ExprPtr scrutinee;
  std::vector<CaseBranch> branches;  // one per constructor, declaration order
};
struct EHole {
  HoleId hole;
};

struct Expr {
  std::variant<EFix, EApp, EVar, EUnit, EPair, EProj, ECtor, ECase, EHole> node;
};

ExprPtr e_fix(Ident fname, Ident param, TypePtr ann, ExprPtr body);
ExprPtr e_app(ExprPtr fn, ExprPtr arg);
ExprPtr e_var(Ident name);
ExprPtr e_unit();
ExprPtr e_pair(ExprPtr fst, ExprPtr snd);
ExprPtr e_proj(int index, ExprPtr arg);
ExprPtr e_ctor(Ident ctor, ExprPtr arg);
ExprPtr e_case(ExprPtr scrutinee, std::vector<CaseBranch> branches);
ExprPtr e_hole(HoleId hole);

// AST size used for staging and ranking: application nodes are free, so a
// call `f a b` counts 3; every other node counts itself plus its children.
int expr_size(const ExprPtr& e);

// Structural equality, ignoring fix-type annotations.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Equality modulo binder names (annotations ignored).
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

void collect_holes(const ExprPtr& e, std::vector<HoleId>& out);
bool expr_mentions_hole(const ExprPtr& e, HoleId h);
// Free occurrence of a variable, respecting shadowing.
bool expr_free_in(const ExprPtr& e, const Ident& name);

// ---------------------------------------------------------------------------
// Type contexts, as persistent cons lists (innermost binding first).
// Bindings carry search metadata: `rec_param` marks a fix self-name together
// with its formal parameter, `decreasing_of` marks case binders that are
// structurally smaller than an enclosing formal parameter.
// ---------------------------------------------------------------------------

struct TypeBinding {
  Ident name;
  TypePtr type;
  std::optional<Ident> rec_param;
  std::optional<Ident> decreasing_of;
  bool is_formal = false;
};

struct TypeCtxNode;
using TypeCtx = std::shared_ptr<const TypeCtxNode>;  // nullptr = empty

struct TypeCtxNode {
  TypeCtx tail;
  TypeBinding binding;
};

TypeCtx ctx_bind(const TypeCtx& ctx, TypeBinding b);
const TypeBinding* ctx_lookup(const TypeCtx& ctx, const Ident& name);
// Outermost-first list of bindings (shadowed entries included).
std::vector<const TypeBinding*> ctx_to_vector(const TypeCtx& ctx);
// Outermost-first list of visible bindings (shadowed entries dropped).
std::vector<const TypeBinding*> ctx_visible(const TypeCtx& ctx);
std::string ctx_fingerprint(const TypeCtx& ctx);

// ---------------------------------------------------------------------------
// Programs: a main expression plus top-level assert statements, where each
// assert side is a closed expression.
// ---------------------------------------------------------------------------

struct Program {
  ExprPtr main;
  std::vector<std::pair<ExprPtr, ExprPtr>> asserts;
};

}  // namespace smyth
