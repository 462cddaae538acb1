#include "smyth/typecheck.hpp"

#include <sstream>

namespace smyth {

std::string TypeError::to_string() const {
  std::ostringstream os;
  os << rule << " at [";
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) os << '.';
    os << path[i];
  }
  os << "]: " << message;
  return os.str();
}

namespace {

struct Fail {
  TypeError err;
};

[[noreturn]] void fail(const std::string& rule, const std::vector<int>& path,
                       const std::string& message) {
  throw Fail{TypeError{rule, path, message}};
}

}  // namespace

// --------------------------------------------------------------------------
// Expressions
// --------------------------------------------------------------------------

namespace {

class Impl {
 public:
  Impl(const HoleContext& delta, const DatatypeContext& sigma)
      : delta_(delta), sigma_(sigma) {}

  TypePtr synth_exp(const TypeCtx& ctx, const ExprPtr& e, std::vector<int>& path) const {
    if (auto* f = std::get_if<EFix>(&e->node)) {
      if (!f->ann) fail("T-Fix", path, "unannotated function cannot be inferred");
      auto* arrow = as_arrow(f->ann);
      if (!arrow) fail("T-Fix", path, "function annotation is not an arrow type");
      TypeCtx inner = ctx;
      if (!f->fname.empty())
        inner = ctx_bind(inner, TypeBinding{f->fname, f->ann, f->param, {}, false});
      inner = ctx_bind(inner, TypeBinding{f->param, arrow->dom, {}, {}, true});
      path.push_back(0);
      check_exp(inner, f->body, arrow->cod, path);
      path.pop_back();
      return f->ann;
    }
    if (auto* v = std::get_if<EVar>(&e->node)) {
      const TypeBinding* b = ctx_lookup(ctx, v->name);
      if (!b) fail("T-Var", path, "unbound variable: " + v->name);
      return b->type;
    }
    if (auto* h = std::get_if<EHole>(&e->node)) {
      auto it = delta_.find(h->hole);
      if (it == delta_.end()) fail("T-Hole", path, "unknown hole");
      check_hole_ctx(ctx, it->second.ctx, h->hole, path);
      return it->second.type;
    }
    if (std::holds_alternative<EUnit>(e->node)) return t_unit();
    if (auto* p = std::get_if<EPair>(&e->node)) {
      path.push_back(0);
      TypePtr f = synth_exp(ctx, p->fst, path);
      path.back() = 1;
      TypePtr s = synth_exp(ctx, p->snd, path);
      path.pop_back();
      return t_pair(std::move(f), std::move(s));
    }
    if (auto* c = std::get_if<ECtor>(&e->node)) {
      auto info = sigma_.ctor(c->ctor);
      if (!info) fail("T-Ctor", path, "unknown constructor: " + c->ctor);
      path.push_back(0);
      check_exp(ctx, c->arg, info->arg, path);
      path.pop_back();
      return t_data(info->datatype);
    }
    if (auto* a = std::get_if<EApp>(&e->node)) {
      path.push_back(0);
      TypePtr fn = synth_exp(ctx, a->fn, path);
      auto* arrow = as_arrow(fn);
      if (!arrow) fail("T-App", path, "applied expression is not a function");
      path.back() = 1;
      check_exp(ctx, a->arg, arrow->dom, path);
      path.pop_back();
      return arrow->cod;
    }
    if (auto* pr = std::get_if<EProj>(&e->node)) {
      path.push_back(0);
      TypePtr t = synth_exp(ctx, pr->arg, path);
      auto* pair = as_pair_type(t);
      if (!pair) fail("T-Prj", path, "projected expression is not a pair");
      path.pop_back();
      return pr->index == 1 ? pair->fst : pair->snd;
    }
    auto* m = std::get_if<ECase>(&e->node);
    path.push_back(0);
    TypePtr st = synth_exp(ctx, m->scrutinee, path);
    auto* data = as_data(st);
    if (!data) fail("T-Case", path, "scrutinee is not of datatype");
    const auto* ctors = sigma_.lookup(data->name);
    if (!ctors) fail("T-Case", path, "unknown datatype: " + data->name);
    path.pop_back();
    if (m->branches.size() != ctors->size())
      fail("T-Case", path, "case must have one branch per constructor of " + data->name);
    TypePtr result;
    for (size_t i = 0; i < ctors->size(); ++i) {
      auto& b = m->branches[i];
      if (b.ctor != (*ctors)[i].name)
        fail("T-Case", path, "branch " + b.ctor + " out of declaration order");
      TypeCtx inner = ctx_bind(ctx, TypeBinding{b.binder, (*ctors)[i].arg, {}, {}, false});
      path.push_back(static_cast<int>(i + 1));
      if (!result) {
        result = synth_exp(inner, b.body, path);
      } else {
        check_exp(inner, b.body, result, path);
      }
      path.pop_back();
    }
    return result;
  }

  void check_exp(const TypeCtx& ctx, const ExprPtr& e, const TypePtr& type,
                 std::vector<int>& path) const {
    // Checking mode matters for unannotated functions; everything else defers
    // to inference plus equality.
    if (auto* f = std::get_if<EFix>(&e->node)) {
      TypePtr ann = f->ann ? f->ann : type;
      auto* arrow = as_arrow(ann);
      if (!arrow || !type_equal(ann, type))
        fail("T-Fix", path, "function used at non-matching type");
      TypeCtx inner = ctx;
      if (!f->fname.empty())
        inner = ctx_bind(inner, TypeBinding{f->fname, ann, f->param, {}, false});
      inner = ctx_bind(inner, TypeBinding{f->param, arrow->dom, {}, {}, true});
      path.push_back(0);
      check_exp(inner, f->body, arrow->cod, path);
      path.pop_back();
      return;
    }
    TypePtr got = synth_exp(ctx, e, path);
    if (!type_equal(got, type)) {
      fail("T-Check", path,
           "expected " + show_type(type) + " but found " + show_type(got));
    }
  }

  // Weakening: the use-site context must bind everything the recorded hole
  // context binds, at the same types.
  void check_hole_ctx(const TypeCtx& use, const TypeCtx& recorded, HoleId h,
                      std::vector<int>& path) const {
    for (auto* b : ctx_visible(recorded)) {
      const TypeBinding* u = ctx_lookup(use, b->name);
      if (!u || !type_equal(u->type, b->type)) {
        fail("T-Hole", path,
             "context disagreement for ??" + std::to_string(h) + " on " + b->name);
      }
    }
  }

  TypePtr synth_result(const ResultPtr& r, std::vector<int>& path) const {
    if (auto* f = std::get_if<RFix>(&r->node)) {
      if (!f->ann) fail("RT-Fix", path, "unannotated closure cannot be inferred");
      auto* arrow = as_arrow(f->ann);
      if (!arrow) fail("RT-Fix", path, "closure annotation is not an arrow type");
      TypeCtx inner = env_ctx(f->env, path);
      if (!f->fname.empty())
        inner = ctx_bind(inner, TypeBinding{f->fname, f->ann, f->param, {}, false});
      inner = ctx_bind(inner, TypeBinding{f->param, arrow->dom, {}, {}, true});
      path.push_back(0);
      check_exp(inner, f->body, arrow->cod, path);
      path.pop_back();
      return f->ann;
    }
    if (std::holds_alternative<RUnit>(r->node)) return t_unit();
    if (auto* p = std::get_if<RPair>(&r->node)) {
      path.push_back(0);
      TypePtr f = synth_result(p->fst, path);
      path.back() = 1;
      TypePtr s = synth_result(p->snd, path);
      path.pop_back();
      return t_pair(std::move(f), std::move(s));
    }
    if (auto* c = std::get_if<RCtor>(&r->node)) {
      auto info = sigma_.ctor(c->ctor);
      if (!info) fail("RT-Ctor", path, "unknown constructor: " + c->ctor);
      path.push_back(0);
      TypePtr arg = synth_result(c->arg, path);
      if (!type_equal(arg, info->arg)) fail("RT-Ctor", path, "constructor argument type");
      path.pop_back();
      return t_data(info->datatype);
    }
    if (auto* h = std::get_if<RHoleClosure>(&r->node)) {
      auto it = delta_.find(h->hole);
      if (it == delta_.end()) fail("RT-Hole", path, "unknown hole");
      check_env_against(it->second.ctx, h->env, path);
      return it->second.type;
    }
    if (auto* a = std::get_if<RApp>(&r->node)) {
      path.push_back(0);
      TypePtr fn = synth_result(a->fn, path);
      auto* arrow = as_arrow(fn);
      if (!arrow) fail("RT-App", path, "applied result is not a function");
      path.back() = 1;
      TypePtr arg = synth_result(a->arg, path);
      if (!type_equal(arg, arrow->dom)) fail("RT-App", path, "argument type mismatch");
      path.pop_back();
      return arrow->cod;
    }
    if (auto* pr = std::get_if<RProj>(&r->node)) {
      path.push_back(0);
      TypePtr t = synth_result(pr->arg, path);
      auto* pair = as_pair_type(t);
      if (!pair) fail("RT-Prj", path, "projected result is not a pair");
      path.pop_back();
      return pr->index == 1 ? pair->fst : pair->snd;
    }
    if (auto* m = std::get_if<RCaseClosure>(&r->node)) {
      path.push_back(0);
      TypePtr st = synth_result(m->scrutinee, path);
      auto* data = as_data(st);
      if (!data) fail("RT-Case", path, "scrutinee is not of datatype");
      const auto* ctors = sigma_.lookup(data->name);
      if (!ctors || ctors->size() != m->branches.size())
        fail("RT-Case", path, "case shape does not match datatype");
      path.pop_back();
      TypeCtx ctx = env_ctx(m->env, path);
      TypePtr result;
      for (size_t i = 0; i < ctors->size(); ++i) {
        auto& b = m->branches[i];
        if (b.ctor != (*ctors)[i].name) fail("RT-Case", path, "branch order");
        TypeCtx inner = ctx_bind(ctx, TypeBinding{b.binder, (*ctors)[i].arg, {}, {}, false});
        path.push_back(static_cast<int>(i + 1));
        if (!result) {
          result = synth_exp(inner, b.body, path);
        } else {
          check_exp(inner, b.body, result, path);
        }
        path.pop_back();
      }
      return result;
    }
    auto* inv = std::get_if<RInverseCtor>(&r->node);
    auto info = sigma_.ctor(inv->ctor);
    if (!info) fail("RT-Inverse", path, "unknown constructor: " + inv->ctor);
    path.push_back(0);
    TypePtr arg = synth_result(inv->arg, path);
    if (!type_equal(arg, t_data(info->datatype)))
      fail("RT-Inverse", path, "inverse application argument type");
    path.pop_back();
    return info->arg;
  }

  // Reconstructs a type context from an environment (memoless; environments
  // here are small).
  TypeCtx env_ctx(const EnvPtr& env, std::vector<int>& path) const {
    TypeCtx ctx;
    for (auto* node : env_to_vector(env)) {
      TypePtr t = synth_result(node->value, path);
      ctx = ctx_bind(ctx, TypeBinding{node->name, std::move(t), {}, {}, false});
    }
    return ctx;
  }

  // Pointwise agreement, domains exactly equal and in the same order.
  void check_env_against(const TypeCtx& ctx, const EnvPtr& env,
                         std::vector<int>& path) const {
    auto bindings = ctx_to_vector(ctx);
    auto entries = env_to_vector(env);
    if (bindings.size() != entries.size())
      fail("ET-Env", path, "environment and context domains differ");
    for (size_t i = 0; i < bindings.size(); ++i) {
      if (bindings[i]->name != entries[i]->name)
        fail("ET-Env", path, "environment binds " + entries[i]->name + " but context has " +
                                 bindings[i]->name);
      TypePtr t = synth_result(entries[i]->value, path);
      if (!type_equal(t, bindings[i]->type))
        fail("ET-Env", path, "binding " + entries[i]->name + " has type " + show_type(t) +
                                 ", context expects " + show_type(bindings[i]->type));
    }
  }

  void check_example(const ExamplePtr& ex, const TypePtr& type,
                     std::vector<int>& path) const {
    if (std::holds_alternative<XTop>(ex->node)) return;  // XT-Top
    if (std::holds_alternative<XUnit>(ex->node)) {
      if (!is_unit_type(type)) fail("XT-Unit", path, "unit example at " + show_type(type));
      return;
    }
    if (auto* p = std::get_if<XPair>(&ex->node)) {
      auto* pt = as_pair_type(type);
      if (!pt) fail("XT-Pair", path, "pair example at " + show_type(type));
      path.push_back(0);
      check_example(p->fst, pt->fst, path);
      path.back() = 1;
      check_example(p->snd, pt->snd, path);
      path.pop_back();
      return;
    }
    if (auto* c = std::get_if<XCtor>(&ex->node)) {
      auto info = sigma_.ctor(c->ctor);
      auto* data = as_data(type);
      if (!info || !data || info->datatype != data->name)
        fail("XT-Ctor", path, "constructor example at " + show_type(type));
      path.push_back(0);
      check_example(c->arg, info->arg, path);
      path.pop_back();
      return;
    }
    auto* io = std::get_if<XInputOutput>(&ex->node);
    auto* arrow = as_arrow(type);
    if (!arrow) fail("XT-Input-Output", path, "input-output example at " + show_type(type));
    path.push_back(0);
    TypePtr in = synth_result(value_to_result(io->input), path);
    if (!type_equal(in, arrow->dom)) fail("XT-Input-Output", path, "input type mismatch");
    path.back() = 1;
    check_example(io->output, arrow->cod, path);
    path.pop_back();
  }

 private:
  const HoleContext& delta_;
  const DatatypeContext& sigma_;
};

}  // namespace

std::optional<TypeError> Checker::check_exp(const TypeCtx& ctx, const ExprPtr& e,
                                            const TypePtr& type) const {
  std::vector<int> path;
  try {
    Impl(delta_, sigma_).check_exp(ctx, e, type, path);
    return std::nullopt;
  } catch (const Fail& f) {
    return f.err;
  }
}

std::optional<TypePtr> Checker::synth_exp(const TypeCtx& ctx, const ExprPtr& e,
                                          TypeError* err) const {
  std::vector<int> path;
  try {
    return Impl(delta_, sigma_).synth_exp(ctx, e, path);
  } catch (const Fail& f) {
    if (err) *err = f.err;
    return std::nullopt;
  }
}

std::optional<TypeError> Checker::check_result(const ResultPtr& r, const TypePtr& type) const {
  std::vector<int> path;
  try {
    TypePtr got = Impl(delta_, sigma_).synth_result(r, path);
    if (!type_equal(got, type)) {
      return TypeError{"RT-Check", {},
                       "expected " + show_type(type) + " but found " + show_type(got)};
    }
    return std::nullopt;
  } catch (const Fail& f) {
    return f.err;
  }
}

std::optional<TypePtr> Checker::synth_result(const ResultPtr& r, TypeError* err) const {
  std::vector<int> path;
  try {
    return Impl(delta_, sigma_).synth_result(r, path);
  } catch (const Fail& f) {
    if (err) *err = f.err;
    return std::nullopt;
  }
}

std::optional<TypeError> Checker::check_env(const TypeCtx& ctx, const EnvPtr& env) const {
  std::vector<int> path;
  try {
    Impl(delta_, sigma_).check_env_against(ctx, env, path);
    return std::nullopt;
  } catch (const Fail& f) {
    return f.err;
  }
}

std::optional<TypeError> Checker::check_example(const ExamplePtr& ex,
                                                const TypePtr& type) const {
  std::vector<int> path;
  try {
    Impl(delta_, sigma_).check_example(ex, type, path);
    return std::nullopt;
  } catch (const Fail& f) {
    return f.err;
  }
}

std::optional<TypeError> Checker::check_constraints(const Constraints& k) const {
  Impl impl(delta_, sigma_);
  std::vector<int> path;
  try {
    for (auto& [h, e] : k.filling.entries()) {
      auto it = delta_.find(h);
      if (it == delta_.end())
        return TypeError{"KT-Fill", {}, "filled hole ??" + std::to_string(h) + " not in context"};
      impl.check_exp(it->second.ctx, e, it->second.type, path);
    }
    for (auto& [h, worlds] : k.unfilled) {
      auto it = delta_.find(h);
      if (it == delta_.end())
        return TypeError{"KT-Worlds", {}, "constrained hole ??" + std::to_string(h) + " not in context"};
      for (auto& w : worlds) {
        impl.check_env_against(it->second.ctx, w.env, path);
        impl.check_example(w.ex, it->second.type, path);
      }
    }
    return std::nullopt;
  } catch (const Fail& f) {
    return f.err;
  }
}

std::optional<Checker::ProgramTypes> Checker::check_program(const Program& p,
                                                            TypeError* err) const {
  Impl impl(delta_, sigma_);
  std::vector<int> path;
  try {
    TypePtr main_type = impl.synth_exp(nullptr, p.main, path);
    TypeCtx ctx = ctx_bind(nullptr, TypeBinding{"main", main_type, {}, {}, false});
    ProgramTypes out{main_type, {}};
    for (auto& [lhs, rhs] : p.asserts) {
      TypePtr lt = impl.synth_exp(ctx, lhs, path);
      TypePtr rt = impl.synth_exp(ctx, rhs, path);
      if (!type_equal(lt, rt)) {
        if (err)
          *err = TypeError{"T-Assert", {},
                           "assert sides at " + show_type(lt) + " vs " + show_type(rt)};
        return std::nullopt;
      }
      out.assert_types.push_back(lt);
    }
    return out;
  } catch (const Fail& f) {
    if (err) *err = f.err;
    return std::nullopt;
  }
}

}  // namespace smyth
