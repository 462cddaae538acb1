#include "smyth/result.hpp"

#include <algorithm>

namespace smyth {

EnvPtr env_bind(const EnvPtr& env, Ident name, ResultPtr value) {
  return std::make_shared<Env>(Env{env, std::move(name), std::move(value)});
}

const ResultPtr* env_lookup(const EnvPtr& env, const Ident& name) {
  for (const Env* n = env.get(); n; n = n->tail.get()) {
    if (n->name == name) return &n->value;
  }
  return nullptr;
}

bool env_equal(const EnvPtr& a, const EnvPtr& b) {
  const Env* x = a.get();
  const Env* y = b.get();
  while (x && y) {
    if (x == y) return true;  // shared tail
    if (x->name != y->name || !result_equal(x->value, y->value)) return false;
    x = x->tail.get();
    y = y->tail.get();
  }
  return x == y;
}

std::vector<const Env*> env_to_vector(const EnvPtr& env) {
  std::vector<const Env*> out;
  for (const Env* n = env.get(); n; n = n->tail.get()) out.push_back(n);
  std::reverse(out.begin(), out.end());
  return out;
}

size_t env_length(const EnvPtr& env) {
  size_t n = 0;
  for (const Env* p = env.get(); p; p = p->tail.get()) ++n;
  return n;
}

ResultPtr r_fix(EnvPtr env, Ident fname, Ident param, TypePtr ann, ExprPtr body) {
  return std::make_shared<Result>(Result{
      RFix{std::move(env), std::move(fname), std::move(param), std::move(ann), std::move(body)}});
}
ResultPtr r_unit() {
  static const ResultPtr u = std::make_shared<Result>(Result{RUnit{}});
  return u;
}
ResultPtr r_pair(ResultPtr fst, ResultPtr snd) {
  return std::make_shared<Result>(Result{RPair{std::move(fst), std::move(snd)}});
}
ResultPtr r_ctor(Ident ctor, ResultPtr arg) {
  return std::make_shared<Result>(Result{RCtor{std::move(ctor), std::move(arg)}});
}
ResultPtr r_hole(EnvPtr env, HoleId hole) {
  return std::make_shared<Result>(Result{RHoleClosure{std::move(env), hole}});
}
ResultPtr r_app(ResultPtr fn, ResultPtr arg) {
  return std::make_shared<Result>(Result{RApp{std::move(fn), std::move(arg)}});
}
ResultPtr r_proj(int index, ResultPtr arg) {
  return std::make_shared<Result>(Result{RProj{index, std::move(arg)}});
}
ResultPtr r_case(EnvPtr env, ResultPtr scrutinee, std::vector<CaseBranch> branches) {
  return std::make_shared<Result>(
      Result{RCaseClosure{std::move(env), std::move(scrutinee), std::move(branches)}});
}
ResultPtr r_inverse_ctor(Ident ctor, ResultPtr arg) {
  return std::make_shared<Result>(Result{RInverseCtor{std::move(ctor), std::move(arg)}});
}

ResultClass classify(const ResultPtr& r) {
  return std::visit(
      [](const auto& n) -> ResultClass {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RFix> || std::is_same_v<T, RUnit> ||
                      std::is_same_v<T, RPair> || std::is_same_v<T, RCtor>) {
          return ResultClass::Determinate;
        } else {
          return ResultClass::Indeterminate;
        }
      },
      r->node);
}

bool result_equal(const ResultPtr& a, const ResultPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* af = std::get_if<RFix>(&a->node)) {
    auto* bf = std::get_if<RFix>(&b->node);
    return af->fname == bf->fname && af->param == bf->param &&
           expr_equal(af->body, bf->body) && env_equal(af->env, bf->env);
  }
  if (auto* ap = std::get_if<RPair>(&a->node)) {
    auto* bp = std::get_if<RPair>(&b->node);
    return result_equal(ap->fst, bp->fst) && result_equal(ap->snd, bp->snd);
  }
  if (auto* ac = std::get_if<RCtor>(&a->node)) {
    auto* bc = std::get_if<RCtor>(&b->node);
    return ac->ctor == bc->ctor && result_equal(ac->arg, bc->arg);
  }
  if (auto* ah = std::get_if<RHoleClosure>(&a->node)) {
    auto* bh = std::get_if<RHoleClosure>(&b->node);
    return ah->hole == bh->hole && env_equal(ah->env, bh->env);
  }
  if (auto* aa = std::get_if<RApp>(&a->node)) {
    auto* ba = std::get_if<RApp>(&b->node);
    return result_equal(aa->fn, ba->fn) && result_equal(aa->arg, ba->arg);
  }
  if (auto* aj = std::get_if<RProj>(&a->node)) {
    auto* bj = std::get_if<RProj>(&b->node);
    return aj->index == bj->index && result_equal(aj->arg, bj->arg);
  }
  if (auto* am = std::get_if<RCaseClosure>(&a->node)) {
    auto* bm = std::get_if<RCaseClosure>(&b->node);
    if (am->branches.size() != bm->branches.size()) return false;
    if (!result_equal(am->scrutinee, bm->scrutinee)) return false;
    if (!env_equal(am->env, bm->env)) return false;
    for (size_t i = 0; i < am->branches.size(); ++i) {
      auto& x = am->branches[i];
      auto& y = bm->branches[i];
      if (x.ctor != y.ctor || x.binder != y.binder || !expr_equal(x.body, y.body))
        return false;
    }
    return true;
  }
  if (auto* ai = std::get_if<RInverseCtor>(&a->node)) {
    auto* bi = std::get_if<RInverseCtor>(&b->node);
    return ai->ctor == bi->ctor && result_equal(ai->arg, bi->arg);
  }
  return true;  // both unit
}

ValuePtr v_unit() {
  static const ValuePtr u = std::make_shared<Value>(Value{VUnit{}});
  return u;
}
ValuePtr v_pair(ValuePtr fst, ValuePtr snd) {
  return std::make_shared<Value>(Value{VPair{std::move(fst), std::move(snd)}});
}
ValuePtr v_ctor(Ident ctor, ValuePtr arg) {
  return std::make_shared<Value>(Value{VCtor{std::move(ctor), std::move(arg)}});
}

bool value_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  if (auto* ap = std::get_if<VPair>(&a->node)) {
    auto* bp = std::get_if<VPair>(&b->node);
    return value_equal(ap->fst, bp->fst) && value_equal(ap->snd, bp->snd);
  }
  if (auto* ac = std::get_if<VCtor>(&a->node)) {
    auto* bc = std::get_if<VCtor>(&b->node);
    return ac->ctor == bc->ctor && value_equal(ac->arg, bc->arg);
  }
  return true;
}

std::optional<ValuePtr> result_to_value(const ResultPtr& r) {
  if (std::holds_alternative<RUnit>(r->node)) return v_unit();
  if (auto* p = std::get_if<RPair>(&r->node)) {
    auto f = result_to_value(p->fst);
    if (!f) return std::nullopt;
    auto s = result_to_value(p->snd);
    if (!s) return std::nullopt;
    return v_pair(*f, *s);
  }
  if (auto* c = std::get_if<RCtor>(&r->node)) {
    auto a = result_to_value(c->arg);
    if (!a) return std::nullopt;
    return v_ctor(c->ctor, *a);
  }
  return std::nullopt;
}

ResultPtr value_to_result(const ValuePtr& v) {
  if (std::holds_alternative<VUnit>(v->node)) return r_unit();
  if (auto* p = std::get_if<VPair>(&v->node)) {
    return r_pair(value_to_result(p->fst), value_to_result(p->snd));
  }
  auto* c = std::get_if<VCtor>(&v->node);
  return r_ctor(c->ctor, value_to_result(c->arg));
}

ExprPtr value_to_expr(const ValuePtr& v) {
  if (std::holds_alternative<VUnit>(v->node)) return e_unit();
  if (auto* p = std::get_if<VPair>(&v->node)) {
    return e_pair(value_to_expr(p->fst), value_to_expr(p->snd));
  }
  auto* c = std::get_if<VCtor>(&v->node);
  return e_ctor(c->ctor, value_to_expr(c->arg));
}

ExamplePtr x_unit() {
  static const ExamplePtr u = std::make_shared<Example>(Example{XUnit{}});
  return u;
}
ExamplePtr x_pair(ExamplePtr fst, ExamplePtr snd) {
  return std::make_shared<Example>(Example{XPair{std::move(fst), std::move(snd)}});
}
ExamplePtr x_ctor(Ident ctor, ExamplePtr arg) {
  return std::make_shared<Example>(Example{XCtor{std::move(ctor), std::move(arg)}});
}
ExamplePtr x_io(ValuePtr input, ExamplePtr output) {
  return std::make_shared<Example>(Example{XInputOutput{std::move(input), std::move(output)}});
}
ExamplePtr x_top() {
  static const ExamplePtr t = std::make_shared<Example>(Example{XTop{}});
  return t;
}

bool example_equal(const ExamplePtr& a, const ExamplePtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  if (auto* ap = std::get_if<XPair>(&a->node)) {
    auto* bp = std::get_if<XPair>(&b->node);
    return example_equal(ap->fst, bp->fst) && example_equal(ap->snd, bp->snd);
  }
  if (auto* ac = std::get_if<XCtor>(&a->node)) {
    auto* bc = std::get_if<XCtor>(&b->node);
    return ac->ctor == bc->ctor && example_equal(ac->arg, bc->arg);
  }
  if (auto* ai = std::get_if<XInputOutput>(&a->node)) {
    auto* bi = std::get_if<XInputOutput>(&b->node);
    return value_equal(ai->input, bi->input) && example_equal(ai->output, bi->output);
  }
  return true;  // unit / top
}

ExamplePtr value_to_example(const ValuePtr& v) {
  if (std::holds_alternative<VUnit>(v->node)) return x_unit();
  if (auto* p = std::get_if<VPair>(&v->node)) {
    return x_pair(value_to_example(p->fst), value_to_example(p->snd));
  }
  auto* c = std::get_if<VCtor>(&v->node);
  return x_ctor(c->ctor, value_to_example(c->arg));
}

std::optional<ValuePtr> example_to_value(const ExamplePtr& ex) {
  if (std::holds_alternative<XUnit>(ex->node)) return v_unit();
  if (auto* p = std::get_if<XPair>(&ex->node)) {
    auto f = example_to_value(p->fst);
    if (!f) return std::nullopt;
    auto s = example_to_value(p->snd);
    if (!s) return std::nullopt;
    return v_pair(*f, *s);
  }
  if (auto* c = std::get_if<XCtor>(&ex->node)) {
    auto a = example_to_value(c->arg);
    if (!a) return std::nullopt;
    return v_ctor(c->ctor, *a);
  }
  return std::nullopt;
}

bool world_equal(const World& a, const World& b) {
  return example_equal(a.ex, b.ex) && env_equal(a.env, b.env);
}

std::vector<World> filter_worlds(const std::vector<World>& worlds) {
  std::vector<World> out;
  for (auto& w : worlds) {
    if (!is_top(w.ex)) out.push_back(w);
  }
  return out;
}

const ExprPtr* HoleFilling::find(HoleId h) const {
  auto it = map_.find(h);
  return it == map_.end() ? nullptr : &it->second;
}

ExprPtr HoleFilling::substitute(const ExprPtr& e) const {
  if (auto* h = std::get_if<EHole>(&e->node)) {
    auto it = map_.find(h->hole);
    if (it == map_.end()) return e;
    // Self-deferred binding stays a hole.
    if (auto* hh = std::get_if<EHole>(&it->second->node); hh && hh->hole == h->hole)
      return e;
    return substitute(it->second);
  }
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EFix>) {
          return e_fix(n.fname, n.param, n.ann, substitute(n.body));
        } else if constexpr (std::is_same_v<T, EApp>) {
          return e_app(substitute(n.fn), substitute(n.arg));
        } else if constexpr (std::is_same_v<T, EPair>) {
          return e_pair(substitute(n.fst), substitute(n.snd));
        } else if constexpr (std::is_same_v<T, EProj>) {
          return e_proj(n.index, substitute(n.arg));
        } else if constexpr (std::is_same_v<T, ECtor>) {
          return e_ctor(n.ctor, substitute(n.arg));
        } else if constexpr (std::is_same_v<T, ECase>) {
          std::vector<CaseBranch> branches;
          branches.reserve(n.branches.size());
          for (auto& b : n.branches)
            branches.push_back(CaseBranch{b.ctor, b.binder, substitute(b.body)});
          return e_case(substitute(n.scrutinee), std::move(branches));
        } else {
          return e;  // var, unit (holes handled above)
        }
      },
      e->node);
}

bool filling_equal(const HoleFilling& a, const HoleFilling& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  for (; ia != a.entries().end(); ++ia, ++ib) {
    if (ia->first != ib->first || !expr_equal(ia->second, ib->second)) return false;
  }
  return true;
}

bool unfilled_equal(const Unfilled& a, const Unfilled& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
    for (size_t i = 0; i < ia->second.size(); ++i) {
      if (!world_equal(ia->second[i], ib->second[i])) return false;
    }
  }
  return true;
}

void unfilled_add(Unfilled& u, HoleId h, const std::vector<World>& worlds) {
  if (worlds.empty()) return;
  auto& list = u[h];
  for (auto& w : worlds) {
    bool dup = false;
    for (auto& existing : list) {
      if (world_equal(existing, w)) {
        dup = true;
        break;
      }
    }
    if (!dup) list.push_back(w);
  }
  if (list.empty()) u.erase(h);
}

bool constraints_equal(const Constraints& a, const Constraints& b) {
  return filling_equal(a.filling, b.filling) && unfilled_equal(a.unfilled, b.unfilled);
}

}  // namespace smyth
