#pragma once

#include <chrono>

#include "smyth/result.hpp"

namespace smyth {

struct FuelExhausted {};
struct SearchTimeout {};

// One budget per top-level query, shared between evaluation and the
// evaluations embedded in resumption. Only function application and case
// branch bodies consume fuel.
class EvalCtx {
 public:
  explicit EvalCtx(long fuel) : fuel_(fuel) {}
  EvalCtx(long fuel, std::chrono::steady_clock::time_point deadline)
      : fuel_(fuel), deadline_(deadline), has_deadline_(true) {}

  void enter() const {
    if (fuel_ <= 0) throw FuelExhausted{};
  }
  void beta() {
    if (--fuel_ <= 0) throw FuelExhausted{};
    if (has_deadline_ && (++ticks_ & 0x3ff) == 0 &&
        std::chrono::steady_clock::now() > deadline_) {
      throw SearchTimeout{};
    }
  }
  long remaining() const { return fuel_; }

 private:
  long fuel_;
  std::chrono::steady_clock::time_point deadline_{};
  bool has_deadline_ = false;
  unsigned ticks_ = 0;
};

// Big-step evaluation around holes; never gets stuck on a final environment.
ResultPtr eval(const EnvPtr& env, const ExprPtr& e, EvalCtx& ctx);

// Continues paused results under a hole filling. Deferred bindings
// (F(h) = ??h) leave the hole in place.
ResultPtr resume(const HoleFilling& filling, const ResultPtr& r, EvalCtx& ctx);

// resume(F, eval(E, e))
ResultPtr live_eval(const EnvPtr& env, const HoleFilling& filling, const ExprPtr& e,
                    EvalCtx& ctx);

// Resumption of an application r1 r2: evaluates the body when r1 resumes to a
// function closure, otherwise produces an indeterminate application.
ResultPtr apply_result(const HoleFilling& filling, const ResultPtr& fn,
                       const ResultPtr& arg, EvalCtx& ctx);

}  // namespace smyth
