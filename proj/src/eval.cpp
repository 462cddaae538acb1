#include "smyth/eval.hpp"

#include <stdexcept>
#include <unordered_map>

namespace smyth {

namespace {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const CaseBranch* find_branch(const std::vector<CaseBranch>& branches, const Ident& ctor) {
  for (auto& b : branches) {
    if (b.ctor == ctor) return &b;
  }
  return nullptr;
}

}  // namespace

ResultPtr eval(const EnvPtr& env, const ExprPtr& e, EvalCtx& ctx) {
  ctx.enter();
  return std::visit(
      [&](const auto& n) -> ResultPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EFix>) {
          return r_fix(env, n.fname, n.param, n.ann, n.body);
        } else if constexpr (std::is_same_v<T, EVar>) {
          const ResultPtr* r = env_lookup(env, n.name);
          if (!r) throw EvalError("unbound variable: " + n.name);
          return *r;
        } else if constexpr (std::is_same_v<T, EUnit>) {
          return r_unit();
        } else if constexpr (std::is_same_v<T, EPair>) {
          ResultPtr f = eval(env, n.fst, ctx);
          return r_pair(std::move(f), eval(env, n.snd, ctx));
        } else if constexpr (std::is_same_v<T, ECtor>) {
          return r_ctor(n.ctor, eval(env, n.arg, ctx));
        } else if constexpr (std::is_same_v<T, EHole>) {
          return r_hole(env, n.hole);
        } else if constexpr (std::is_same_v<T, EApp>) {
          ResultPtr fn = eval(env, n.fn, ctx);
          ResultPtr arg = eval(env, n.arg, ctx);
          if (auto* f = std::get_if<RFix>(&fn->node)) {
            ctx.beta();
            EnvPtr call = f->fname.empty() ? f->env : env_bind(f->env, f->fname, fn);
            call = env_bind(call, f->param, arg);
            return eval(call, f->body, ctx);
          }
          return r_app(std::move(fn), std::move(arg));
        } else if constexpr (std::is_same_v<T, EProj>) {
          ResultPtr arg = eval(env, n.arg, ctx);
          if (auto* p = std::get_if<RPair>(&arg->node)) {
            return n.index == 1 ? p->fst : p->snd;
          }
          return r_proj(n.index, std::move(arg));
        } else {  // ECase
          ResultPtr scrutinee = eval(env, n.scrutinee, ctx);
          if (auto* c = std::get_if<RCtor>(&scrutinee->node)) {
            const CaseBranch* b = find_branch(n.branches, c->ctor);
            if (!b) throw EvalError("missing case branch: " + c->ctor);
            ctx.beta();
            return eval(env_bind(env, b->binder, c->arg), b->body, ctx);
          }
          return r_case(env, std::move(scrutinee), n.branches);
        }
      },
      e->node);
}

namespace {

// Memoizes environment and result resumption by node identity within one
// top-level resume; the filling is fixed for its lifetime.
struct Resumer {
  const HoleFilling& filling;
  EvalCtx& ctx;
  std::unordered_map<const Env*, EnvPtr> env_memo;
  std::unordered_map<const Result*, ResultPtr> memo;

  EnvPtr env(const EnvPtr& e) {
    if (!e) return e;
    auto it = env_memo.find(e.get());
    if (it != env_memo.end()) return it->second;
    EnvPtr tail = env(e->tail);
    ResultPtr value = result(e->value);
    EnvPtr out = (tail == e->tail && value == e->value)
                     ? e
                     : env_bind(tail, e->name, std::move(value));
    env_memo.emplace(e.get(), out);
    return out;
  }

  ResultPtr result(const ResultPtr& r) {
    auto it = memo.find(r.get());
    if (it != memo.end()) return it->second;
    ResultPtr out = compute(r);
    memo.emplace(r.get(), out);
    return out;
  }

  ResultPtr compute(const ResultPtr& r) {
    return std::visit(
        [&](const auto& n) -> ResultPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, RHoleClosure>) {
            const ExprPtr* filled = filling.find(n.hole);
            bool deferred = false;
            if (filled) {
              if (auto* h = std::get_if<EHole>(&(*filled)->node);
                  h && h->hole == n.hole) {
                deferred = true;
              }
            }
            if (filled && !deferred) {
              ResultPtr inner = eval(env(n.env), *filled, ctx);
              return result(inner);
            }
            EnvPtr e = env(n.env);
            return e == n.env ? r : r_hole(std::move(e), n.hole);
          } else if constexpr (std::is_same_v<T, RFix>) {
            EnvPtr e = env(n.env);
            return e == n.env ? r : r_fix(std::move(e), n.fname, n.param, n.ann, n.body);
          } else if constexpr (std::is_same_v<T, RUnit>) {
            return r;
          } else if constexpr (std::is_same_v<T, RPair>) {
            ResultPtr f = result(n.fst);
            ResultPtr s = result(n.snd);
            return (f == n.fst && s == n.snd) ? r : r_pair(std::move(f), std::move(s));
          } else if constexpr (std::is_same_v<T, RCtor>) {
            ResultPtr a = result(n.arg);
            return a == n.arg ? r : r_ctor(n.ctor, std::move(a));
          } else if constexpr (std::is_same_v<T, RApp>) {
            ResultPtr fn = result(n.fn);
            ResultPtr arg = result(n.arg);
            if (auto* f = std::get_if<RFix>(&fn->node)) {
              ctx.beta();
              EnvPtr call = f->fname.empty() ? f->env : env_bind(f->env, f->fname, fn);
              call = env_bind(call, f->param, arg);
              ResultPtr body = eval(call, f->body, ctx);
              return result(body);
            }
            return (fn == n.fn && arg == n.arg) ? r : r_app(std::move(fn), std::move(arg));
          } else if constexpr (std::is_same_v<T, RProj>) {
            ResultPtr arg = result(n.arg);
            if (auto* p = std::get_if<RPair>(&arg->node)) {
              return n.index == 1 ? p->fst : p->snd;
            }
            return arg == n.arg ? r : r_proj(n.index, std::move(arg));
          } else if constexpr (std::is_same_v<T, RCaseClosure>) {
            ResultPtr scrutinee = result(n.scrutinee);
            if (auto* c = std::get_if<RCtor>(&scrutinee->node)) {
              const CaseBranch* b = find_branch(n.branches, c->ctor);
              if (!b) throw EvalError("missing case branch: " + c->ctor);
              ctx.beta();
              ResultPtr body = eval(env_bind(env(n.env), b->binder, c->arg), b->body, ctx);
              return result(body);
            }
            EnvPtr e = env(n.env);
            if (e == n.env && scrutinee == n.scrutinee) return r;
            return r_case(std::move(e), std::move(scrutinee), n.branches);
          } else {  // RInverseCtor
            ResultPtr arg = result(n.arg);
            if (auto* c = std::get_if<RCtor>(&arg->node); c && c->ctor == n.ctor) {
              return c->arg;
            }
            return arg == n.arg ? r : r_inverse_ctor(n.ctor, std::move(arg));
          }
        },
        r->node);
  }
};

struct EvalError2 {};

}  // namespace

ResultPtr resume(const HoleFilling& filling, const ResultPtr& r, EvalCtx& ctx) {
  if (filling.empty()) return r;
  Resumer resumer{filling, ctx, {}, {}};
  return resumer.result(r);
}

ResultPtr live_eval(const EnvPtr& env, const HoleFilling& filling, const ExprPtr& e,
                    EvalCtx& ctx) {
  return resume(filling, eval(env, e, ctx), ctx);
}

ResultPtr apply_result(const HoleFilling& filling, const ResultPtr& fn,
                       const ResultPtr& arg, EvalCtx& ctx) {
  ResultPtr fn2 = resume(filling, fn, ctx);
  ResultPtr arg2 = resume(filling, arg, ctx);
  if (auto* f = std::get_if<RFix>(&fn2->node)) {
    ctx.beta();
    EnvPtr call = f->fname.empty() ? f->env : env_bind(f->env, f->fname, fn2);
    call = env_bind(call, f->param, arg2);
    return resume(filling, eval(call, f->body, ctx), ctx);
  }
  return r_app(std::move(fn2), std::move(arg2));
}

}  // namespace smyth
