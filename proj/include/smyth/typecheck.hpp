#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smyth/result.hpp"

namespace smyth {

struct TypeError {
  std::string rule;
  std::vector<int> path;  // child indices from the checked root
  std::string message;

  std::string to_string() const;
};

// Bidirectional checking for expressions, results, environments, examples,
// constraints and programs. Holes are checked against the hole context; a
// use-site context may extend the recorded one (weakening).
class Checker {
 public:
  Checker(const HoleContext& delta, const DatatypeContext& sigma)
      : delta_(delta), sigma_(sigma) {}

  std::optional<TypeError> check_exp(const TypeCtx& ctx, const ExprPtr& e,
                                     const TypePtr& type) const;
  // Inference; fails where the type is not syntax-directed (e.g. a bare hole
  // in function position).
  std::optional<TypePtr> synth_exp(const TypeCtx& ctx, const ExprPtr& e,
                                   TypeError* err = nullptr) const;

  std::optional<TypeError> check_result(const ResultPtr& r, const TypePtr& type) const;
  std::optional<TypePtr> synth_result(const ResultPtr& r, TypeError* err = nullptr) const;

  std::optional<TypeError> check_env(const TypeCtx& ctx, const EnvPtr& env) const;
  std::optional<TypeError> check_example(const ExamplePtr& ex, const TypePtr& type) const;
  std::optional<TypeError> check_constraints(const Constraints& k) const;

  struct ProgramTypes {
    TypePtr main_type;
    std::vector<TypePtr> assert_types;  // one common type per assert pair
  };
  std::optional<ProgramTypes> check_program(const Program& p, TypeError* err = nullptr) const;

 private:
  const HoleContext& delta_;
  const DatatypeContext& sigma_;
};

}  // namespace smyth
