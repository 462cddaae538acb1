#include "smyth/ast.hpp"

#include <algorithm>
#include <sstream>

namespace smyth {

TypePtr t_arrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<TypeExpr>(TypeExpr{TArrow{std::move(dom), std::move(cod)}});
}
TypePtr t_unit() {
  static const TypePtr u = std::make_shared<TypeExpr>(TypeExpr{TUnit{}});
  return u;
}
TypePtr t_pair(TypePtr fst, TypePtr snd) {
  return std::make_shared<TypeExpr>(TypeExpr{TPair{std::move(fst), std::move(snd)}});
}
TypePtr t_data(Ident name) {
  return std::make_shared<TypeExpr>(TypeExpr{TData{std::move(name)}});
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* ar = std::get_if<TArrow>(&a->node)) {
    auto* br = std::get_if<TArrow>(&b->node);
    return type_equal(ar->dom, br->dom) && type_equal(ar->cod, br->cod);
  }
  if (auto* ap = std::get_if<TPair>(&a->node)) {
    auto* bp = std::get_if<TPair>(&b->node);
    return type_equal(ap->fst, bp->fst) && type_equal(ap->snd, bp->snd);
  }
  if (auto* ad = std::get_if<TData>(&a->node)) {
    return ad->name == std::get_if<TData>(&b->node)->name;
  }
  return true;  // both unit
}

namespace {

void show_type_prec(const TypePtr& t, int prec, std::string& out) {
  // prec 0 = arrow position, 1 = pair component, 2 = atom
  if (auto* ar = std::get_if<TArrow>(&t->node)) {
    bool parens = prec > 0;
    if (parens) out += '(';
    show_type_prec(ar->dom, 1, out);
    out += " -> ";
    show_type_prec(ar->cod, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* p = std::get_if<TPair>(&t->node)) {
    bool parens = prec > 1;
    if (parens) out += '(';
    show_type_prec(p->fst, 2, out);
    out += " * ";
    show_type_prec(p->snd, 1, out);  // right-associative
    if (parens) out += ')';
    return;
  }
  if (auto* d = std::get_if<TData>(&t->node)) {
    out += d->name;
    return;
  }
  out += "()";
}

}  // namespace

std::string show_type(const TypePtr& t) {
  std::string out;
  show_type_prec(t, 0, out);
  return out;
}

void DatatypeContext::declare(const Ident& datatype, std::vector<CtorDef> ctors) {
  for (auto& [name, existing] : datatypes_) {
    if (name == datatype) throw std::runtime_error("duplicate datatype: " + datatype);
  }
  size_t dt = datatypes_.size();
  for (size_t i = 0; i < ctors.size(); ++i) {
    auto [it, inserted] = ctor_index_.emplace(ctors[i].name, std::make_pair(dt, i));
    if (!inserted) throw std::runtime_error("duplicate constructor: " + ctors[i].name);
  }
  datatypes_.emplace_back(datatype, std::move(ctors));
}

const std::vector<CtorDef>* DatatypeContext::lookup(const Ident& datatype) const {
  for (auto& [name, ctors] : datatypes_) {
    if (name == datatype) return &ctors;
  }
  return nullptr;
}

std::optional<DatatypeContext::CtorInfo> DatatypeContext::ctor(const Ident& c) const {
  auto it = ctor_index_.find(c);
  if (it == ctor_index_.end()) return std::nullopt;
  auto& [dt, idx] = it->second;
  return CtorInfo{datatypes_[dt].first, datatypes_[dt].second[idx].arg, idx};
}

ExprPtr e_fix(Ident fname, Ident param, TypePtr ann, ExprPtr body) {
  return std::make_shared<Expr>(
      Expr{EFix{std::move(fname), std::move(param), std::move(ann), std::move(body)}});
}
ExprPtr e_app(ExprPtr fn, ExprPtr arg) {
  return std::make_shared<Expr>(Expr{EApp{std::move(fn), std::move(arg)}});
}
ExprPtr e_var(Ident name) { return std::make_shared<Expr>(Expr{EVar{std::move(name)}}); }
ExprPtr e_unit() {
  static const ExprPtr u = std::make_shared<Expr>(Expr{EUnit{}});
  return u;
}
ExprPtr e_pair(ExprPtr fst, ExprPtr snd) {
  return std::make_shared<Expr>(Expr{EPair{std::move(fst), std::move(snd)}});
}
ExprPtr e_proj(int index, ExprPtr arg) {
  return std::make_shared<Expr>(Expr{EProj{index, std::move(arg)}});
}
ExprPtr e_ctor(Ident ctor, ExprPtr arg) {
  return std::make_shared<Expr>(Expr{ECtor{std::move(ctor), std::move(arg)}});
}
ExprPtr e_case(ExprPtr scrutinee, std::vector<CaseBranch> branches) {
  return std::make_shared<Expr>(Expr{ECase{std::move(scrutinee), std::move(branches)}});
}
ExprPtr e_hole(HoleId hole) { return std::make_shared<Expr>(Expr{EHole{hole}}); }

int expr_size(const ExprPtr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EFix>) {
          return 1 + expr_size(n.body);
        } else if constexpr (std::is_same_v<T, EApp>) {
          return expr_size(n.fn) + expr_size(n.arg);
        } else if constexpr (std::is_same_v<T, EPair>) {
          return 1 + expr_size(n.fst) + expr_size(n.snd);
        } else if constexpr (std::is_same_v<T, EProj>) {
          return 1 + expr_size(n.arg);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          return 1 + expr_size(n.arg);
        } else if constexpr (std::is_same_v<T, ECase>) {
          int s = 1 + expr_size(n.scrutinee);
          for (auto& b : n.branches) s += expr_size(b.body);
          return s;
        } else {
          return 1;  // var, unit, hole
        }
      },
      e->node);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* af = std::get_if<EFix>(&a->node)) {
    auto* bf = std::get_if<EFix>(&b->node);
    return af->fname == bf->fname && af->param == bf->param &&
           expr_equal(af->body, bf->body);
  }
  if (auto* aa = std::get_if<EApp>(&a->node)) {
    auto* ba = std::get_if<EApp>(&b->node);
    return expr_equal(aa->fn, ba->fn) && expr_equal(aa->arg, ba->arg);
  }
  if (auto* av = std::get_if<EVar>(&a->node)) {
    return av->name == std::get_if<EVar>(&b->node)->name;
  }
  if (auto* ap = std::get_if<EPair>(&a->node)) {
    auto* bp = std::get_if<EPair>(&b->node);
    return expr_equal(ap->fst, bp->fst) && expr_equal(ap->snd, bp->snd);
  }
  if (auto* aj = std::get_if<EProj>(&a->node)) {
    auto* bj = std::get_if<EProj>(&b->node);
    return aj->index == bj->index && expr_equal(aj->arg, bj->arg);
  }
  if (auto* ac = std::get_if<ECtor>(&a->node)) {
    auto* bc = std::get_if<ECtor>(&b->node);
    return ac->ctor == bc->ctor && expr_equal(ac->arg, bc->arg);
  }
  if (auto* am = std::get_if<ECase>(&a->node)) {
    auto* bm = std::get_if<ECase>(&b->node);
    if (am->branches.size() != bm->branches.size()) return false;
    if (!expr_equal(am->scrutinee, bm->scrutinee)) return false;
    for (size_t i = 0; i < am->branches.size(); ++i) {
      auto& x = am->branches[i];
      auto& y = bm->branches[i];
      if (x.ctor != y.ctor || x.binder != y.binder || !expr_equal(x.body, y.body))
        return false;
    }
    return true;
  }
  if (auto* ah = std::get_if<EHole>(&a->node)) {
    return ah->hole == std::get_if<EHole>(&b->node)->hole;
  }
  return true;  // both unit
}

namespace {

// Binder renaming maps for alpha-equivalence.
struct AlphaScope {
  std::vector<std::pair<Ident, Ident>> pairs;  // (left name, right name)

  bool var_match(const Ident& a, const Ident& b) const {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    }
    return a == b;  // both free
  }
};

bool alpha_rec(const ExprPtr& a, const ExprPtr& b, AlphaScope& scope) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* af = std::get_if<EFix>(&a->node)) {
    auto* bf = std::get_if<EFix>(&b->node);
    scope.pairs.emplace_back(af->fname, bf->fname);
    scope.pairs.emplace_back(af->param, bf->param);
    bool ok = alpha_rec(af->body, bf->body, scope);
    scope.pairs.pop_back();
    scope.pairs.pop_back();
    return ok;
  }
  if (auto* aa = std::get_if<EApp>(&a->node)) {
    auto* ba = std::get_if<EApp>(&b->node);
    return alpha_rec(aa->fn, ba->fn, scope) && alpha_rec(aa->arg, ba->arg, scope);
  }
  if (auto* av = std::get_if<EVar>(&a->node)) {
    return scope.var_match(av->name, std::get_if<EVar>(&b->node)->name);
  }
  if (auto* ap = std::get_if<EPair>(&a->node)) {
    auto* bp = std::get_if<EPair>(&b->node);
    return alpha_rec(ap->fst, bp->fst, scope) && alpha_rec(ap->snd, bp->snd, scope);
  }
  if (auto* aj = std::get_if<EProj>(&a->node)) {
    auto* bj = std::get_if<EProj>(&b->node);
    return aj->index == bj->index && alpha_rec(aj->arg, bj->arg, scope);
  }
  if (auto* ac = std::get_if<ECtor>(&a->node)) {
    auto* bc = std::get_if<ECtor>(&b->node);
    return ac->ctor == bc->ctor && alpha_rec(ac->arg, bc->arg, scope);
  }
  if (auto* am = std::get_if<ECase>(&a->node)) {
    auto* bm = std::get_if<ECase>(&b->node);
    if (am->branches.size() != bm->branches.size()) return false;
    if (!alpha_rec(am->scrutinee, bm->scrutinee, scope)) return false;
    for (size_t i = 0; i < am->branches.size(); ++i) {
      auto& x = am->branches[i];
      auto& y = bm->branches[i];
      if (x.ctor != y.ctor) return false;
      scope.pairs.emplace_back(x.binder, y.binder);
      bool ok = alpha_rec(x.body, y.body, scope);
      scope.pairs.pop_back();
      if (!ok) return false;
    }
    return true;
  }
  if (auto* ah = std::get_if<EHole>(&a->node)) {
    return ah->hole == std::get_if<EHole>(&b->node)->hole;
  }
  return true;
}

}  // namespace

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  AlphaScope scope;
  return alpha_rec(a, b, scope);
}

void collect_holes(const ExprPtr& e, std::vector<HoleId>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EFix>) {
          collect_holes(n.body, out);
        } else if constexpr (std::is_same_v<T, EApp>) {
          collect_holes(n.fn, out);
          collect_holes(n.arg, out);
        } else if constexpr (std::is_same_v<T, EPair>) {
          collect_holes(n.fst, out);
          collect_holes(n.snd, out);
        } else if constexpr (std::is_same_v<T, EProj>) {
          collect_holes(n.arg, out);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          collect_holes(n.arg, out);
        } else if constexpr (std::is_same_v<T, ECase>) {
          collect_holes(n.scrutinee, out);
          for (auto& b : n.branches) collect_holes(b.body, out);
        } else if constexpr (std::is_same_v<T, EHole>) {
          out.push_back(n.hole);
        }
      },
      e->node);
}

bool expr_mentions_hole(const ExprPtr& e, HoleId h) {
  std::vector<HoleId> holes;
  collect_holes(e, holes);
  return std::find(holes.begin(), holes.end(), h) != holes.end();
}

bool expr_free_in(const ExprPtr& e, const Ident& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EVar>) {
          return n.name == name;
        } else if constexpr (std::is_same_v<T, EFix>) {
          if (n.fname == name || n.param == name) return false;
          return expr_free_in(n.body, name);
        } else if constexpr (std::is_same_v<T, EApp>) {
          return expr_free_in(n.fn, name) || expr_free_in(n.arg, name);
        } else if constexpr (std::is_same_v<T, EPair>) {
          return expr_free_in(n.fst, name) || expr_free_in(n.snd, name);
        } else if constexpr (std::is_same_v<T, EProj>) {
          return expr_free_in(n.arg, name);
        } else if constexpr (std::is_same_v<T, ECtor>) {
          return expr_free_in(n.arg, name);
        } else if constexpr (std::is_same_v<T, ECase>) {
          if (expr_free_in(n.scrutinee, name)) return true;
          for (auto& b : n.branches) {
            if (b.binder != name && expr_free_in(b.body, name)) return true;
          }
          return false;
        } else {
          return false;
        }
      },
      e->node);
}

TypeCtx ctx_bind(const TypeCtx& ctx, TypeBinding b) {
  return std::make_shared<TypeCtxNode>(TypeCtxNode{ctx, std::move(b)});
}

const TypeBinding* ctx_lookup(const TypeCtx& ctx, const Ident& name) {
  for (const TypeCtxNode* n = ctx.get(); n; n = n->tail.get()) {
    if (n->binding.name == name) return &n->binding;
  }
  return nullptr;
}

std::vector<const TypeBinding*> ctx_to_vector(const TypeCtx& ctx) {
  std::vector<const TypeBinding*> out;
  for (const TypeCtxNode* n = ctx.get(); n; n = n->tail.get()) out.push_back(&n->binding);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<const TypeBinding*> ctx_visible(const TypeCtx& ctx) {
  std::vector<const TypeBinding*> out;
  std::vector<Ident> seen;
  for (const TypeCtxNode* n = ctx.get(); n; n = n->tail.get()) {
    if (std::find(seen.begin(), seen.end(), n->binding.name) != seen.end()) continue;
    seen.push_back(n->binding.name);
    out.push_back(&n->binding);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string ctx_fingerprint(const TypeCtx& ctx) {
  auto visible = ctx_visible(ctx);
  std::vector<std::string> parts;
  parts.reserve(visible.size());
  for (auto* b : visible) {
    std::string s = b->name + ":" + show_type(b->type);
    if (b->rec_param) s += "!rec=" + *b->rec_param;
    if (b->decreasing_of) s += "!dec=" + *b->decreasing_of;
    if (b->is_formal) s += "!p";
    parts.push_back(std::move(s));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (auto& p : parts) {
    out += p;
    out += ';';
  }
  return out;
}

}  // namespace smyth
