#include "smyth/surface.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace smyth {

std::string ParseError::to_string() const {
  std::ostringstream os;
  os << "parse error at " << line << ":" << col << ": " << message;
  return os.str();
}

std::string ElabError::to_string() const {
  std::ostringstream os;
  os << "error";
  if (line > 0) os << " at " << line << ":" << col;
  os << ": " << message;
  return os.str();
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident,
  UIdent,
  Number,
  Hole,     // ?? or ??k (id in `num`)
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Semi,
  Pipe,
  Arrow,
  Equal,
  EqEq,
  Star,
  Lambda,
  KwType,
  KwCase,
  KwOf,
  KwAssert,
  KwSpec2,
  KwFix,
  KwFst,
  KwSnd,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long num = -1;
  int line = 1;
  int col = 1;
};

struct Lexer {
  const std::string& src;
  size_t i = 0;
  int line = 1;
  int col = 1;
  std::vector<Token> tokens;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError{line, col, msg}; }

  char peek() const { return i < src.size() ? src[i] : '\0'; }
  char peek2() const { return i + 1 < src.size() ? src[i + 1] : '\0'; }

  void advance() {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void push(Tok kind, std::string text, int l, int c, long num = -1) {
    tokens.push_back(Token{kind, std::move(text), num, l, c});
  }

  static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_cont(char c) {
    return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
  }

  void run() {
    while (i < src.size()) {
      char c = peek();
      int l = line, cl = col;
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        continue;
      }
      if (c == '-' && peek2() == '-') {
        while (i < src.size() && peek() != '\n') advance();
        continue;
      }
      if (c == '-' && peek2() == '>') {
        advance();
        advance();
        push(Tok::Arrow, "->", l, cl);
        continue;
      }
      if (c == '?' && peek2() == '?') {
        advance();
        advance();
        long id = -1;
        if (i < src.size() && peek() >= '0' && peek() <= '9') {
          id = 0;
          while (i < src.size() && peek() >= '0' && peek() <= '9') {
            id = id * 10 + (peek() - '0');
            advance();
          }
        }
        push(Tok::Hole, "??", l, cl, id);
        continue;
      }
      if (c == '=' && peek2() == '=') {
        advance();
        advance();
        push(Tok::EqEq, "==", l, cl);
        continue;
      }
      switch (c) {
        case '(':
          advance();
          push(Tok::LParen, "(", l, cl);
          continue;
        case ')':
          advance();
          push(Tok::RParen, ")", l, cl);
          continue;
        case '[':
          advance();
          push(Tok::LBracket, "[", l, cl);
          continue;
        case ']':
          advance();
          push(Tok::RBracket, "]", l, cl);
          continue;
        case ',':
          advance();
          push(Tok::Comma, ",", l, cl);
          continue;
        case ':':
          advance();
          push(Tok::Colon, ":", l, cl);
          continue;
        case ';':
          advance();
          push(Tok::Semi, ";", l, cl);
          continue;
        case '|':
          advance();
          push(Tok::Pipe, "|", l, cl);
          continue;
        case '=':
          advance();
          push(Tok::Equal, "=", l, cl);
          continue;
        case '*':
          advance();
          push(Tok::Star, "*", l, cl);
          continue;
        case '\\':
          advance();
          push(Tok::Lambda, "\\", l, cl);
          continue;
        default:
          break;
      }
      if (c >= '0' && c <= '9') {
        long n = 0;
        while (i < src.size() && peek() >= '0' && peek() <= '9') {
          n = n * 10 + (peek() - '0');
          advance();
        }
        push(Tok::Number, "", l, cl, n);
        continue;
      }
      if (ident_start(c)) {
        std::string name;
        while (i < src.size() && ident_cont(peek())) {
          name += peek();
          advance();
        }
        Tok kind;
        if (name == "type") {
          kind = Tok::KwType;
        } else if (name == "case") {
          kind = Tok::KwCase;
        } else if (name == "of") {
          kind = Tok::KwOf;
        } else if (name == "assert") {
          kind = Tok::KwAssert;
        } else if (name == "spec2") {
          kind = Tok::KwSpec2;
        } else if (name == "fix") {
          kind = Tok::KwFix;
        } else if (name == "fst") {
          kind = Tok::KwFst;
        } else if (name == "snd") {
          kind = Tok::KwSnd;
        } else if (name[0] >= 'A' && name[0] <= 'Z') {
          kind = Tok::UIdent;
        } else {
          kind = Tok::Ident;
        }
        push(kind, std::move(name), l, cl);
        continue;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    push(Tok::End, "", line, col);
  }
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  std::vector<SHole*> holes_in_order;
  std::set<HoleId> used_hole_ids;

  explicit Parser(const std::string& text) {
    Lexer lex(text);
    lex.run();
    toks = std::move(lex.tokens);
  }

  const Token& cur() const { return toks[pos]; }
  const Token& next() const { return toks[pos + 1 < toks.size() ? pos + 1 : pos]; }
  bool at(Tok k) const { return cur().kind == k; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError{cur().line, cur().col, msg};
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    Token t = cur();
    ++pos;
    return t;
  }

  bool eat(Tok k) {
    if (!at(k)) return false;
    ++pos;
    return true;
  }

  SPos here() const { return SPos{cur().line, cur().col}; }

  SExprPtr make(SPos p, auto node) {
    auto e = std::make_shared<SExpr>();
    e->node = std::move(node);
    e->pos = p;
    return e;
  }

  // --- types ---

  TypePtr parse_type() {
    TypePtr left = parse_type_prod();
    if (eat(Tok::Arrow)) return t_arrow(std::move(left), parse_type());
    return left;
  }

  TypePtr parse_type_prod() {
    TypePtr left = parse_type_atom();
    if (eat(Tok::Star)) return t_pair(std::move(left), parse_type_prod());
    return left;
  }

  TypePtr parse_type_atom() {
    if (eat(Tok::LParen)) {
      if (eat(Tok::RParen)) return t_unit();
      TypePtr t = parse_type();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::UIdent)) {
      Ident name = cur().text;
      ++pos;
      return t_data(std::move(name));
    }
    fail("expected a type");
  }

  // --- expressions ---

  SExprPtr parse_expr() {
    if (at(Tok::KwCase)) return parse_case();
    if (at(Tok::KwFix)) return parse_fix(false);
    if (at(Tok::Lambda)) return parse_fix(true);
    return parse_app();
  }

  SExprPtr parse_case() {
    SPos p = here();
    expect(Tok::KwCase, "'case'");
    SExprPtr scrutinee = parse_expr();
    expect(Tok::KwOf, "'of'");
    std::vector<SBranch> branches;
    while (true) {
      SPos bp = here();
      Token ctor = expect(Tok::UIdent, "constructor pattern");
      Ident binder = "_";
      if (at(Tok::Ident)) {
        binder = cur().text;
        ++pos;
      }
      expect(Tok::Arrow, "'->'");
      SExprPtr body = parse_expr();
      branches.push_back(SBranch{ctor.text, std::move(binder), std::move(body), bp});
      if (!eat(Tok::Semi)) break;
    }
    return make(p, SCase{std::move(scrutinee), std::move(branches)});
  }

  SExprPtr parse_fix(bool lambda) {
    SPos p = here();
    ++pos;  // 'fix' or '\'
    Ident fname;
    if (!lambda) fname = expect(Tok::Ident, "function name").text;
    std::vector<Ident> params;
    while (at(Tok::Ident)) {
      params.push_back(cur().text);
      ++pos;
    }
    if (params.empty()) fail("expected at least one parameter");
    expect(Tok::Arrow, "'->'");
    SExprPtr body = parse_expr();
    return make(p, SFix{std::move(fname), std::move(params), std::move(body)});
  }

  bool at_atom_start() const {
    switch (cur().kind) {
      case Tok::LParen:
      case Tok::LBracket:
      case Tok::Ident:
      case Tok::UIdent:
      case Tok::Number:
      case Tok::Hole:
      case Tok::KwFst:
      case Tok::KwSnd:
        return true;
      default:
        return false;
    }
  }

  SExprPtr parse_app() {
    SPos p = here();
    if (!at_atom_start()) fail("expected an expression");
    // Leading constructor applies to the following atom.
    if (at(Tok::UIdent)) {
      Ident ctor = cur().text;
      ++pos;
      SExprPtr arg = at_atom_start() ? parse_atom() : nullptr;
      SExprPtr acc = make(p, SCtorApp{std::move(ctor), std::move(arg)});
      while (at_atom_start()) acc = make(p, SApp{std::move(acc), parse_atom()});
      return acc;
    }
    SExprPtr acc = parse_atom();
    while (at_atom_start()) acc = make(p, SApp{std::move(acc), parse_atom()});
    return acc;
  }

  SExprPtr parse_atom() {
    SPos p = here();
    if (eat(Tok::LParen)) {
      if (eat(Tok::RParen)) return make(p, SUnit{});
      SExprPtr first = parse_expr();
      if (eat(Tok::Comma)) {
        SExprPtr second = parse_expr();
        while (eat(Tok::Comma)) {  // right-nested tuples
          second = make(p, SPairLit{std::move(second), parse_expr()});
        }
        expect(Tok::RParen, "')'");
        return make(p, SPairLit{std::move(first), std::move(second)});
      }
      expect(Tok::RParen, "')'");
      return first;
    }
    if (eat(Tok::LBracket)) {
      std::vector<SExprPtr> elems;
      if (!eat(Tok::RBracket)) {
        elems.push_back(parse_expr());
        while (eat(Tok::Comma)) elems.push_back(parse_expr());
        expect(Tok::RBracket, "']'");
      }
      return make(p, SList{std::move(elems)});
    }
    if (at(Tok::KwFst) || at(Tok::KwSnd)) {
      int index = at(Tok::KwFst) ? 1 : 2;
      ++pos;
      return make(p, SProj{index, parse_atom()});
    }
    if (at(Tok::Ident)) {
      Ident name = cur().text;
      ++pos;
      return make(p, SVar{std::move(name)});
    }
    if (at(Tok::UIdent)) {
      Ident name = cur().text;
      ++pos;
      return make(p, SCtorApp{std::move(name), nullptr});
    }
    if (at(Tok::Number)) {
      long n = cur().num;
      ++pos;
      return make(p, SNum{n});
    }
    if (at(Tok::Hole)) {
      long id = cur().num;
      ++pos;
      auto e = make(p, SHole{});
      auto& h = std::get<SHole>(e->node);
      if (id >= 0) {
        if (!used_hole_ids.insert(static_cast<HoleId>(id)).second) {
          throw ParseError{p.line, p.col, "duplicate hole ??" + std::to_string(id)};
        }
        h.id = static_cast<HoleId>(id);
      }
      holes_in_order.push_back(&h);
      return e;
    }
    fail("expected an expression");
  }

  // --- items ---

  SourceFile parse_file() {
    SourceFile file;
    std::map<Ident, TypePtr> pending_sigs;
    while (!at(Tok::End)) {
      if (at(Tok::KwType)) {
        file.types.push_back(parse_typedecl());
        continue;
      }
      if (at(Tok::KwAssert)) {
        SPos p = here();
        ++pos;
        expect(Tok::LParen, "'('");
        SExprPtr lhs = parse_expr();
        expect(Tok::EqEq, "'=='");
        SExprPtr rhs = parse_expr();
        expect(Tok::RParen, "')'");
        file.asserts.push_back(SAssert{std::move(lhs), std::move(rhs), p});
        continue;
      }
      if (at(Tok::KwSpec2)) {
        SPos p = here();
        ++pos;
        Ident fn = expect(Tok::Ident, "function name").text;
        expect(Tok::LBracket, "'['");
        while (true) {
          expect(Tok::LParen, "'('");
          SExprPtr a = parse_expr();
          expect(Tok::Comma, "','");
          SExprPtr b = parse_expr();
          expect(Tok::Comma, "','");
          SExprPtr c = parse_expr();
          expect(Tok::RParen, "')'");
          SExprPtr call = make(p, SApp{make(p, SApp{make(p, SVar{fn}), std::move(a)}),
                                       std::move(b)});
          file.asserts.push_back(SAssert{std::move(call), std::move(c), p});
          if (!eat(Tok::Comma)) break;
        }
        expect(Tok::RBracket, "']'");
        continue;
      }
      if (at(Tok::Ident)) {
        SPos p = here();
        Ident name = cur().text;
        ++pos;
        if (eat(Tok::Colon)) {
          TypePtr sig = parse_type();
          if (pending_sigs.count(name))
            throw ParseError{p.line, p.col, "duplicate signature for " + name};
          pending_sigs[name] = std::move(sig);
          continue;
        }
        // Equation: name params* = expr
        std::vector<Ident> params;
        while (at(Tok::Ident)) {
          params.push_back(cur().text);
          ++pos;
        }
        expect(Tok::Equal, "'=' or ':'");
        SExprPtr body = parse_expr();
        auto sig = pending_sigs.find(name);
        if (sig == pending_sigs.end())
          throw ParseError{p.line, p.col, "missing type signature for " + name};
        file.defs.push_back(SDef{name, sig->second, std::move(params), std::move(body), p});
        pending_sigs.erase(sig);
        continue;
      }
      fail("expected a declaration");
    }
    if (!pending_sigs.empty()) {
      fail("signature without definition: " + pending_sigs.begin()->first);
    }
    number_holes();
    return file;
  }

  STypeDecl parse_typedecl() {
    SPos p = here();
    expect(Tok::KwType, "'type'");
    Ident name = expect(Tok::UIdent, "datatype name").text;
    expect(Tok::Equal, "'='");
    STypeDecl decl{std::move(name), {}, p};
    while (true) {
      Ident ctor = expect(Tok::UIdent, "constructor").text;
      std::optional<TypePtr> arg;
      if (at(Tok::UIdent) || at(Tok::LParen)) arg = parse_type_atom();
      decl.ctors.emplace_back(std::move(ctor), std::move(arg));
      if (!eat(Tok::Pipe)) break;
    }
    return decl;
  }

  void number_holes() {
    HoleId next = 0;
    for (SHole* h : holes_in_order) {
      if (h->id) continue;
      while (used_hole_ids.count(next)) ++next;
      h->id = next;
      used_hole_ids.insert(next);
    }
  }
};

}  // namespace

SourceFile parse(const std::string& text) {
  Parser parser(text);
  return parser.parse_file();
}

SExprPtr parse_expr(const std::string& text) {
  Parser parser(text);
  SExprPtr e = parser.parse_expr();
  if (!parser.at(Tok::End)) parser.fail("trailing input after expression");
  parser.number_holes();
  return e;
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

namespace {

struct Elab {
  DatatypeContext& sigma;
  HoleContext& delta;
  std::map<HoleId, int>* depths;  // optional

  [[noreturn]] void fail(const SPos& pos, const std::string& msg) const {
    throw ElabError{msg, pos.line, pos.col};
  }

  ExprPtr check(const TypeCtx& ctx, const SExprPtr& e, const TypePtr& type, int depth) {
    if (auto* h = std::get_if<SHole>(&e->node)) {
      if (!h->id) fail(e->pos, "unnumbered hole");
      if (delta.count(*h->id)) fail(e->pos, "duplicate hole ??" + std::to_string(*h->id));
      delta.emplace(*h->id, ContextualType{ctx, type});
      if (depths) (*depths)[*h->id] = depth;
      return e_hole(*h->id);
    }
    if (auto* f = std::get_if<SFix>(&e->node)) {
      return elab_fix(ctx, e->pos, f->fname, f->params, f->body, type, depth);
    }
    if (auto* p = std::get_if<SPairLit>(&e->node)) {
      auto* pt = as_pair_type(type);
      if (!pt) fail(e->pos, "pair written where " + show_type(type) + " is expected");
      ExprPtr fst = check(ctx, p->fst, pt->fst, depth);
      return e_pair(std::move(fst), check(ctx, p->snd, pt->snd, depth));
    }
    if (auto* c = std::get_if<SCase>(&e->node)) {
      return elab_case(ctx, e->pos, *c, &type, depth);
    }
    ExprPtr out;
    TypePtr got = synth(ctx, e, depth, &out);
    if (!type_equal(got, type)) {
      fail(e->pos, "expected " + show_type(type) + " but found " + show_type(got));
    }
    return out;
  }

  TypePtr synth(const TypeCtx& ctx, const SExprPtr& e, int depth, ExprPtr* out) {
    if (auto* v = std::get_if<SVar>(&e->node)) {
      const TypeBinding* b = ctx_lookup(ctx, v->name);
      if (!b) fail(e->pos, "unbound variable: " + v->name);
      *out = e_var(v->name);
      return b->type;
    }
    if (auto* c = std::get_if<SCtorApp>(&e->node)) {
      auto info = sigma.ctor(c->ctor);
      if (!info) fail(e->pos, "unknown constructor: " + c->ctor);
      ExprPtr arg;
      if (c->arg) {
        arg = check(ctx, c->arg, info->arg, depth);
      } else if (is_unit_type(info->arg)) {
        arg = e_unit();
      } else {
        fail(e->pos, "constructor " + c->ctor + " expects an argument");
      }
      *out = e_ctor(c->ctor, std::move(arg));
      return t_data(info->datatype);
    }
    if (auto* a = std::get_if<SApp>(&e->node)) {
      ExprPtr fn;
      TypePtr fn_type = synth(ctx, a->fn, depth, &fn);
      auto* arrow = as_arrow(fn_type);
      if (!arrow) fail(e->pos, "applied expression is not a function");
      ExprPtr arg = check(ctx, a->arg, arrow->dom, depth);
      *out = e_app(std::move(fn), std::move(arg));
      return arrow->cod;
    }
    if (std::holds_alternative<SUnit>(e->node)) {
      *out = e_unit();
      return t_unit();
    }
    if (auto* p = std::get_if<SPairLit>(&e->node)) {
      ExprPtr fst, snd;
      TypePtr ft = synth(ctx, p->fst, depth, &fst);
      TypePtr st = synth(ctx, p->snd, depth, &snd);
      *out = e_pair(std::move(fst), std::move(snd));
      return t_pair(std::move(ft), std::move(st));
    }
    if (auto* pr = std::get_if<SProj>(&e->node)) {
      ExprPtr arg;
      TypePtr t = synth(ctx, pr->arg, depth, &arg);
      auto* pt = as_pair_type(t);
      if (!pt) fail(e->pos, "projection of a non-pair");
      *out = e_proj(pr->index, std::move(arg));
      return pr->index == 1 ? pt->fst : pt->snd;
    }
    if (auto* n = std::get_if<SNum>(&e->node)) {
      if (!sigma.ctor("S") || !sigma.ctor("Z")) fail(e->pos, "numerals need Nat");
      ExprPtr acc = e_ctor("Z", e_unit());
      for (long i = 0; i < n->value; ++i) acc = e_ctor("S", std::move(acc));
      *out = std::move(acc);
      return t_data("Nat");
    }
    if (auto* l = std::get_if<SList>(&e->node)) {
      if (!sigma.ctor("Cons") || !sigma.ctor("Nil")) fail(e->pos, "list sugar needs NatList");
      ExprPtr acc = e_ctor("Nil", e_unit());
      for (auto it = l->elems.rbegin(); it != l->elems.rend(); ++it) {
        ExprPtr elem = check(ctx, *it, t_data("Nat"), depth);
        acc = e_ctor("Cons", e_pair(std::move(elem), std::move(acc)));
      }
      *out = std::move(acc);
      return t_data("NatList");
    }
    if (auto* c = std::get_if<SCase>(&e->node)) {
      *out = elab_case(ctx, e->pos, *c, nullptr, depth);
      // elab_case stores the synthesized type here
      return case_type_;
    }
    if (std::holds_alternative<SHole>(e->node)) {
      fail(e->pos, "cannot infer a type for a hole in this position");
    }
    fail(e->pos, "function literal needs an expected type");
  }

  ExprPtr elab_case(const TypeCtx& ctx, const SPos& pos, const SCase& c,
                    const TypePtr* expected, int depth) {
    ExprPtr scrutinee;
    TypePtr st = synth(ctx, c.scrutinee, depth, &scrutinee);
    auto* data = as_data(st);
    if (!data) fail(pos, "case scrutinee is not of datatype");
    const auto* ctors = sigma.lookup(data->name);
    if (!ctors) fail(pos, "unknown datatype: " + data->name);

    // Structural-decrease bookkeeping: binders of a case over a formal
    // parameter (or something already decreasing) are decreasing.
    std::optional<Ident> dec;
    {
      const SExpr* root = c.scrutinee.get();
      while (auto* pr = std::get_if<SProj>(&root->node)) root = pr->arg.get();
      if (auto* v = std::get_if<SVar>(&root->node)) {
        const TypeBinding* b = ctx_lookup(ctx, v->name);
        if (b) {
          if (b->decreasing_of) {
            dec = b->decreasing_of;
          } else if (b->is_formal) {
            dec = v->name;
          }
        }
      }
    }

    std::vector<const SBranch*> ordered(ctors->size(), nullptr);
    for (auto& b : c.branches) {
      bool placed = false;
      for (size_t i = 0; i < ctors->size(); ++i) {
        if ((*ctors)[i].name == b.ctor) {
          if (ordered[i]) fail(b.pos, "duplicate branch for " + b.ctor);
          ordered[i] = &b;
          placed = true;
          break;
        }
      }
      if (!placed) fail(b.pos, "constructor " + b.ctor + " is not part of " + data->name);
    }
    for (size_t i = 0; i < ctors->size(); ++i) {
      if (!ordered[i]) fail(pos, "missing branch for " + (*ctors)[i].name);
    }

    std::vector<CaseBranch> branches;
    TypePtr result = expected ? *expected : nullptr;
    for (size_t i = 0; i < ctors->size(); ++i) {
      const SBranch& b = *ordered[i];
      TypeCtx inner = ctx_bind(ctx, TypeBinding{b.binder, (*ctors)[i].arg, {}, dec, false});
      ExprPtr body;
      if (result) {
        body = check(inner, b.body, result, depth + 1);
      } else {
        result = synth(inner, b.body, depth + 1, &body);
      }
      branches.push_back(CaseBranch{b.ctor, b.binder, std::move(body)});
    }
    case_type_ = result;
    return e_case(std::move(scrutinee), std::move(branches));
  }

  // Multi-parameter definitions become nested fixes; only the outermost one
  // carries the definition's recursive name.
  ExprPtr elab_fix(const TypeCtx& ctx, const SPos& pos, const Ident& fname,
                   const std::vector<Ident>& params, const SExprPtr& body,
                   const TypePtr& type, int depth) {
    std::vector<TypePtr> arg_types;
    std::vector<TypePtr> fix_types;
    TypePtr t = type;
    for (size_t i = 0; i < params.size(); ++i) {
      auto* arrow = as_arrow(t);
      if (!arrow) fail(pos, "too many parameters for type " + show_type(type));
      fix_types.push_back(t);
      arg_types.push_back(arrow->dom);
      t = arrow->cod;
    }
    TypeCtx inner = ctx;
    std::vector<Ident> names;
    for (size_t i = 0; i < params.size(); ++i) {
      Ident self = (i == 0) ? fname : "";
      names.push_back(self);
      if (!self.empty())
        inner = ctx_bind(inner, TypeBinding{self, fix_types[i], params[i], {}, false});
      inner = ctx_bind(inner, TypeBinding{params[i], arg_types[i], {}, {}, true});
    }
    ExprPtr core = check(inner, body, t, depth);
    for (size_t i = params.size(); i-- > 0;) {
      core = e_fix(names[i], params[i], fix_types[i], std::move(core));
    }
    return core;
  }

  TypePtr case_type_;
};

void declare_types(DatatypeContext& sigma, const std::vector<STypeDecl>& decls) {
  for (auto& d : decls) {
    std::vector<CtorDef> ctors;
    for (auto& [name, arg] : d.ctors) {
      ctors.push_back(CtorDef{name, arg ? *arg : t_unit()});
    }
    try {
      sigma.declare(d.name, std::move(ctors));
    } catch (const std::runtime_error& e) {
      throw ElabError{e.what(), d.pos.line, d.pos.col};
    }
  }
}

// Datatype names mentioned in constructor argument types must resolve.
void validate_types(const DatatypeContext& sigma) {
  std::function<void(const TypePtr&)> visit = [&](const TypePtr& t) {
    if (auto* a = as_arrow(t)) {
      visit(a->dom);
      visit(a->cod);
    } else if (auto* p = as_pair_type(t)) {
      visit(p->fst);
      visit(p->snd);
    } else if (auto* d = as_data(t)) {
      if (!sigma.lookup(d->name)) throw ElabError{"unknown datatype: " + d->name};
    }
  };
  for (auto& [name, ctors] : sigma.datatypes()) {
    for (auto& c : ctors) visit(c.arg);
  }
}

void free_names(const SExprPtr& e, std::vector<Ident>& bound, std::set<Ident>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SVar>) {
          for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
            if (*it == n.name) return;
          }
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, SCtorApp>) {
          if (n.arg) free_names(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, SApp>) {
          free_names(n.fn, bound, out);
          free_names(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, SPairLit>) {
          free_names(n.fst, bound, out);
          free_names(n.snd, bound, out);
        } else if constexpr (std::is_same_v<T, SProj>) {
          free_names(n.arg, bound, out);
        } else if constexpr (std::is_same_v<T, SCase>) {
          free_names(n.scrutinee, bound, out);
          for (auto& b : n.branches) {
            bound.push_back(b.binder);
            free_names(b.body, bound, out);
            bound.pop_back();
          }
        } else if constexpr (std::is_same_v<T, SList>) {
          for (auto& el : n.elems) free_names(el, bound, out);
        } else if constexpr (std::is_same_v<T, SFix>) {
          size_t mark = bound.size();
          if (!n.fname.empty()) bound.push_back(n.fname);
          for (auto& p : n.params) bound.push_back(p);
          free_names(n.body, bound, out);
          bound.resize(mark);
        }
      },
      e->node);
}

}  // namespace

Elaborated desugar(const SourceFile& file, const SourceFile& prelude) {
  Elaborated out;
  declare_types(out.sigma, prelude.types);
  declare_types(out.sigma, file.types);
  validate_types(out.sigma);

  // Prune prelude definitions that nothing references.
  std::set<Ident> needed;
  {
    std::vector<Ident> bound;
    for (auto& d : file.defs) free_names(d.body, bound, needed);
    for (auto& a : file.asserts) {
      free_names(a.lhs, bound, needed);
      free_names(a.rhs, bound, needed);
    }
    // Transitive closure over prelude definitions (later prelude defs may use
    // earlier ones).
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& d : prelude.defs) {
        if (!needed.count(d.name)) continue;
        std::set<Ident> extra;
        free_names(d.body, bound, extra);
        for (auto& name : extra) {
          if (needed.insert(name).second) changed = true;
        }
      }
    }
  }

  std::vector<const SDef*> defs;
  for (auto& d : prelude.defs) {
    if (needed.count(d.name)) defs.push_back(&d);
  }
  for (auto& d : file.defs) defs.push_back(&d);
  if (defs.empty()) throw ElabError{"no definitions"};

  Elab elab{out.sigma, out.delta, &out.hole_case_depth};

  // Elaborate definitions in order, each seeing the previous ones.
  TypeCtx ctx;
  std::vector<ExprPtr> cores;
  std::vector<TypePtr> types;
  for (auto* d : defs) {
    ExprPtr core;
    if (d->params.empty()) {
      core = elab.check(ctx, d->body, d->sig, 0);
    } else {
      core = elab.elab_fix(ctx, d->pos, d->name, d->params, d->body, d->sig, 0);
    }
    cores.push_back(core);
    types.push_back(d->sig);
    ctx = ctx_bind(ctx, TypeBinding{d->name, d->sig, {}, {}, true});
    out.def_names.push_back(d->name);
  }
  out.def_ctx = ctx;
  out.last_def = defs.back()->name;
  out.last_def_type = types.back();

  // Definitions close over earlier ones with anonymous immediately-applied
  // lambdas; main is the value of the last definition.
  TypePtr main_type = types.back();
  auto close = [&](ExprPtr inner, const TypePtr& inner_type) -> ExprPtr {
    ExprPtr acc = std::move(inner);
    for (size_t j = defs.size() - 1; j-- > 0;) {
      ExprPtr lam = e_fix("", defs[j]->name, t_arrow(types[j], inner_type), acc);
      acc = e_app(std::move(lam), cores[j]);
    }
    return acc;
  };
  auto close_all = [&](ExprPtr inner, const TypePtr& inner_type) -> ExprPtr {
    ExprPtr acc = std::move(inner);
    for (size_t j = defs.size(); j-- > 0;) {
      ExprPtr lam = e_fix("", defs[j]->name, t_arrow(types[j], inner_type), acc);
      acc = e_app(std::move(lam), cores[j]);
    }
    return acc;
  };
  out.program.main = close(cores.back(), main_type);

  // Assert sides close over every definition the same way.
  for (auto& a : file.asserts) {
    TypeCtx actx = ctx;
    ExprPtr lhs_core = nullptr, rhs_core = nullptr;
    TypePtr lt, rt;
    try {
      lt = elab.synth(actx, a.lhs, 0, &lhs_core);
      rt = elab.synth(actx, a.rhs, 0, &rhs_core);
    } catch (const ElabError&) {
      // One side may need the other's type (e.g. a hole); retry in order.
      if (!lhs_core) {
        rt = elab.synth(actx, a.rhs, 0, &rhs_core);
        lhs_core = elab.check(actx, a.lhs, rt, 0);
        lt = rt;
      } else {
        rhs_core = elab.check(actx, a.rhs, lt, 0);
        rt = lt;
      }
    }
    if (!type_equal(lt, rt))
      throw ElabError{"assert sides have different types: " + show_type(lt) + " vs " +
                          show_type(rt),
                      a.pos.line, a.pos.col};
    out.program.asserts.emplace_back(close_all(lhs_core, lt), close_all(rhs_core, rt));
  }

  return out;
}

ExprPtr elab_expr(const DatatypeContext& sigma, HoleContext& delta, const TypeCtx& ctx,
                  const SExprPtr& e, const TypePtr& expected) {
  Elab elab{const_cast<DatatypeContext&>(sigma), delta, nullptr};
  return elab.check(ctx, e, expected, 0);
}

// ---------------------------------------------------------------------------
// Prelude
// ---------------------------------------------------------------------------

const char* builtin_prelude() {
  return R"(-- standard datatypes and helpers
type Nat = Z | S Nat
type Bool = False | True
type NatList = Nil | Cons (Nat * NatList)
type NatTree = Leaf | Node (NatTree * Nat * NatTree)
type MaybeNat = Nothing | Just Nat

append : NatList -> NatList -> NatList
append xs ys =
  case xs of
    Nil -> ys;
    Cons p -> Cons (fst p, append (snd p) ys)
)";
}

SourceFile load_prelude() {
  if (const char* path = std::getenv("SMYTH_PRELUDE")) {
    std::ifstream in(path);
    if (!in) throw ElabError{std::string("cannot open prelude: ") + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }
  return parse(builtin_prelude());
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace {

bool nat_literal(const ExprPtr& e, long& n) {
  const Expr* cur = e.get();
  long count = 0;
  while (true) {
    auto* c = std::get_if<ECtor>(&cur->node);
    if (!c) return false;
    if (c->ctor == "Z") {
      if (!std::holds_alternative<EUnit>(c->arg->node)) return false;
      n = count;
      return true;
    }
    if (c->ctor != "S") return false;
    ++count;
    cur = c->arg.get();
  }
}

bool list_literal(const ExprPtr& e, std::vector<ExprPtr>& elems) {
  const Expr* cur = e.get();
  while (true) {
    auto* c = std::get_if<ECtor>(&cur->node);
    if (!c) return false;
    if (c->ctor == "Nil") return std::holds_alternative<EUnit>(c->arg->node);
    if (c->ctor != "Cons") return false;
    auto* p = std::get_if<EPair>(&c->arg->node);
    if (!p) return false;
    elems.push_back(p->fst);
    cur = p->snd.get();
  }
}

bool anonymous(const Ident& name) { return name.empty(); }

// prec: 0 = open position, 1 = application argument (atom required)
void print_expr(const ExprPtr& e, int prec, std::string& out) {
  long n;
  if (nat_literal(e, n)) {
    out += std::to_string(n);
    return;
  }
  std::vector<ExprPtr> elems;
  if (list_literal(e, elems)) {
    out += '[';
    for (size_t i = 0; i < elems.size(); ++i) {
      if (i) out += ", ";
      print_expr(elems[i], 0, out);
    }
    out += ']';
    return;
  }
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, EVar>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, EUnit>) {
          out += "()";
        } else if constexpr (std::is_same_v<T, EHole>) {
          out += "??" + std::to_string(node.hole);
        } else if constexpr (std::is_same_v<T, EPair>) {
          out += '(';
          print_expr(node.fst, 0, out);
          out += ", ";
          print_expr(node.snd, 0, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, EProj>) {
          bool parens = prec > 0;
          if (parens) out += '(';
          out += node.index == 1 ? "fst " : "snd ";
          print_expr(node.arg, 1, out);
          if (parens) out += ')';
        } else if constexpr (std::is_same_v<T, ECtor>) {
          if (std::holds_alternative<EUnit>(node.arg->node)) {
            out += node.ctor;
            return;
          }
          bool parens = prec > 0;
          if (parens) out += '(';
          out += node.ctor;
          out += ' ';
          print_expr(node.arg, 1, out);
          if (parens) out += ')';
        } else if constexpr (std::is_same_v<T, EApp>) {
          bool parens = prec > 0;
          if (parens) out += '(';
          print_expr(node.fn, 0, out);
          out += ' ';
          print_expr(node.arg, 1, out);
          if (parens) out += ')';
        } else if constexpr (std::is_same_v<T, EFix>) {
          bool parens = prec > 0;
          if (parens) out += '(';
          std::vector<Ident> params{node.param};
          const Expr* body = node.body.get();
          while (auto* inner = std::get_if<EFix>(&body->node)) {
            if (!anonymous(inner->fname)) break;
            params.push_back(inner->param);
            body = inner->body.get();
          }
          if (anonymous(node.fname)) {
            out += '\\';
          } else {
            out += "fix ";
            out += node.fname;
            out += ' ';
          }
          for (size_t i = 0; i < params.size(); ++i) {
            if (i) out += ' ';
            out += params[i];
          }
          out += " -> ";
          // print the collapsed body
          ExprPtr b = node.body;
          for (size_t i = 1; i < params.size(); ++i) {
            b = std::get_if<EFix>(&b->node)->body;
          }
          print_expr(b, 0, out);
          if (parens) out += ')';
        } else {  // ECase
          bool parens = prec > 0;
          if (parens) out += '(';
          out += "case ";
          print_expr(node.scrutinee, 0, out);
          out += " of ";
          for (size_t i = 0; i < node.branches.size(); ++i) {
            if (i) out += "; ";
            auto& b = node.branches[i];
            out += b.ctor;
            if (b.binder != "_") {
              out += ' ';
              out += b.binder;
            }
            out += " -> ";
            bool last = i + 1 == node.branches.size();
            // non-final branches with a case body need parentheses to avoid
            // swallowing later branches
            bool body_is_case = std::holds_alternative<ECase>(b.body->node);
            if (body_is_case && !last) {
              out += '(';
              print_expr(b.body, 0, out);
              out += ')';
            } else {
              print_expr(b.body, 0, out);
            }
          }
          if (parens) out += ')';
        }
      },
      e->node);
}

void print_result(const ResultPtr& r, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RUnit>) {
          out += "()";
        } else if constexpr (std::is_same_v<T, RPair>) {
          out += '(';
          print_result(node.fst, out);
          out += ", ";
          print_result(node.snd, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, RCtor>) {
          // reuse value printing when the whole subtree is simple
          ResultPtr self = r_ctor(node.ctor, node.arg);
          if (auto v = result_to_value(self)) {
            print_expr(value_to_expr(*v), 1, out);
            return;
          }
          out += node.ctor;
          out += " (";
          print_result(node.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, RFix>) {
          out += "<fun";
          if (!anonymous(node.fname)) {
            out += ' ';
            out += node.fname;
          }
          out += '>';
        } else if constexpr (std::is_same_v<T, RHoleClosure>) {
          out += "??" + std::to_string(node.hole) + "{|" +
                 std::to_string(env_length(node.env)) + "|}";
        } else if constexpr (std::is_same_v<T, RApp>) {
          out += '(';
          print_result(node.fn, out);
          out += ' ';
          print_result(node.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, RProj>) {
          out += node.index == 1 ? "fst (" : "snd (";
          print_result(node.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, RCaseClosure>) {
          out += "case (";
          print_result(node.scrutinee, out);
          out += ") of <" + std::to_string(node.branches.size()) + " branches>";
        } else {  // RInverseCtor
          out += node.ctor + "^-1 (";
          print_result(node.arg, out);
          out += ')';
        }
      },
      r->node);
}

}  // namespace

std::string pretty(const ExprPtr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

std::string pretty(const ResultPtr& r) {
  std::string out;
  print_result(r, out);
  return out;
}

std::string pretty(const HoleFilling& filling) {
  std::string out;
  for (auto& [h, e] : filling.entries()) {
    out += "??" + std::to_string(h) + " := " + pretty(e) + "\n";
  }
  return out;
}

}  // namespace smyth
