#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smyth/result.hpp"

namespace smyth {

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const;
};

struct ElabError {
  std::string message;
  int line = 0;
  int col = 0;

  std::string to_string() const;
};

// ---------------------------------------------------------------------------
// Surface syntax
// ---------------------------------------------------------------------------

struct SExpr;
using SExprPtr = std::shared_ptr<SExpr>;

struct SPos {
  int line = 0;
  int col = 0;
};

struct SVar {
  Ident name;
};
struct SCtorApp {
  Ident ctor;
  SExprPtr arg;  // null for nullary usage
};
struct SApp {
  SExprPtr fn;
  SExprPtr arg;
};
struct SUnit {};
struct SPairLit {
  SExprPtr fst;
  SExprPtr snd;
};
struct SProj {
  int index;
  SExprPtr arg;
};
struct SBranch {
  Ident ctor;
  Ident binder;  // "_" when omitted
  SExprPtr body;
  SPos pos;
};
struct SCase {
  SExprPtr scrutinee;
  std::vector<SBranch> branches;
};
struct SHole {
  std::optional<HoleId> id;  // filled in by the parser's numbering pass
};
struct SNum {
  long value;
};
struct SList {
  std::vector<SExprPtr> elems;
};
struct SFix {
  Ident fname;  // "" for anonymous lambdas
  std::vector<Ident> params;
  SExprPtr body;
};

struct SExpr {
  std::variant<SVar, SCtorApp, SApp, SUnit, SPairLit, SProj, SCase, SHole, SNum, SList,
               SFix>
      node;
  SPos pos;
};

struct STypeDecl {
  Ident name;
  std::vector<std::pair<Ident, std::optional<TypePtr>>> ctors;  // nullopt = unit-encoded
  SPos pos;
};

struct SDef {
  Ident name;
  TypePtr sig;
  std::vector<Ident> params;
  SExprPtr body;
  SPos pos;
};

struct SAssert {
  SExprPtr lhs;
  SExprPtr rhs;
  SPos pos;
};

struct SourceFile {
  std::vector<STypeDecl> types;
  std::vector<SDef> defs;
  std::vector<SAssert> asserts;  // spec2 rows are expanded here
};

// Throws ParseError. Hole numbering is deterministic: source order, from 0,
// skipping explicitly named holes.
SourceFile parse(const std::string& text);
// Parses a single expression (used for round-tripping printed terms).
SExprPtr parse_expr(const std::string& text);

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

struct Elaborated {
  DatatypeContext sigma;
  HoleContext delta;
  Program program;
  std::map<HoleId, int> hole_case_depth;  // enclosing cases per hole
  std::vector<Ident> def_names;           // in order, prelude pruned
  Ident last_def;
  TypePtr last_def_type;
  TypeCtx def_ctx;  // all retained definitions, outermost-first
};

// Throws ElabError. Unreferenced prelude definitions are pruned so hole
// contexts stay minimal.
Elaborated desugar(const SourceFile& file, const SourceFile& prelude);

// Elaborates one expression against an expected type (testing and validation
// helper). Fresh holes found here extend `delta`.
ExprPtr elab_expr(const DatatypeContext& sigma, HoleContext& delta, const TypeCtx& ctx,
                  const SExprPtr& e, const TypePtr& expected);

// Built-in prelude source; SMYTH_PRELUDE overrides with a file path.
const char* builtin_prelude();
SourceFile load_prelude();

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string pretty(const ExprPtr& e);
std::string pretty(const ResultPtr& r);
std::string pretty(const HoleFilling& filling);

}  // namespace smyth
