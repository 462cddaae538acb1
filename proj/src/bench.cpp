#include "smyth/bench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

namespace smyth {

std::vector<TaskSpec> parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<TaskSpec> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TaskSpec t;
    std::string timeout;
    if (!std::getline(ss, t.file, '\t') || !std::getline(ss, t.experiment, '\t') ||
        !std::getline(ss, t.expected, '\t') || !std::getline(ss, t.objective, '\t') ||
        !std::getline(ss, timeout, '\t')) {
      throw std::runtime_error("malformed manifest line: " + line);
    }
    t.timeout_s = std::stod(timeout);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// ---------------------------------------------------------------------------
// Input enumeration
// ---------------------------------------------------------------------------

namespace {

std::vector<ValuePtr> nats(int max) {
  std::vector<ValuePtr> out;
  ValuePtr v = v_ctor("Z", v_unit());
  out.push_back(v);
  for (int i = 0; i < max; ++i) {
    v = v_ctor("S", v);
    out.push_back(v);
  }
  return out;
}

std::vector<ValuePtr> nat_lists(int max_len, int max_elem) {
  std::vector<ValuePtr> out;
  std::vector<ValuePtr> elems = nats(max_elem);
  std::vector<ValuePtr> level{v_ctor("Nil", v_unit())};
  out.push_back(level[0]);
  for (int len = 1; len <= max_len; ++len) {
    std::vector<ValuePtr> next;
    for (auto& e : elems) {
      for (auto& tail : level) {
        next.push_back(v_ctor("Cons", v_pair(e, tail)));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

std::vector<ValuePtr> nat_trees(int max_nodes, int max_elem) {
  std::vector<std::vector<ValuePtr>> by_nodes(max_nodes + 1);
  by_nodes[0].push_back(v_ctor("Leaf", v_unit()));
  std::vector<ValuePtr> elems = nats(max_elem);
  for (int n = 1; n <= max_nodes; ++n) {
    for (int left = 0; left < n; ++left) {
      int right = n - 1 - left;
      for (auto& l : by_nodes[left]) {
        for (auto& e : elems) {
          for (auto& r : by_nodes[right]) {
            by_nodes[n].push_back(v_ctor("Node", v_pair(l, v_pair(e, r))));
          }
        }
      }
    }
  }
  std::vector<ValuePtr> out;
  for (auto& level : by_nodes) out.insert(out.end(), level.begin(), level.end());
  return out;
}

void generic_values(const DatatypeContext& sigma, const TypePtr& type, int depth,
                    std::vector<ValuePtr>& out);

void ctor_values(const DatatypeContext& sigma, const Ident& dt, int depth,
                 std::vector<ValuePtr>& out) {
  const auto* ctors = sigma.lookup(dt);
  if (!ctors || depth < 0) return;
  for (auto& c : *ctors) {
    std::vector<ValuePtr> args;
    generic_values(sigma, c.arg, depth - 1, args);
    for (auto& a : args) out.push_back(v_ctor(c.name, a));
  }
}

void generic_values(const DatatypeContext& sigma, const TypePtr& type, int depth,
                    std::vector<ValuePtr>& out) {
  if (is_unit_type(type)) {
    out.push_back(v_unit());
    return;
  }
  if (auto* p = as_pair_type(type)) {
    std::vector<ValuePtr> fs, ss;
    generic_values(sigma, p->fst, depth, fs);
    generic_values(sigma, p->snd, depth, ss);
    for (auto& f : fs) {
      for (auto& s : ss) out.push_back(v_pair(f, s));
    }
    return;
  }
  if (auto* d = as_data(type)) {
    ctor_values(sigma, d->name, depth, out);
  }
}

}  // namespace

std::vector<ValuePtr> enumerate_values(const DatatypeContext& sigma, const TypePtr& type) {
  if (auto* d = as_data(type)) {
    if (d->name == "Nat") return nats(4);
    if (d->name == "Bool") {
      return {v_ctor("False", v_unit()), v_ctor("True", v_unit())};
    }
    if (d->name == "NatList") return nat_lists(3, 2);
    if (d->name == "NatTree") return nat_trees(3, 1);
    if (d->name == "MaybeNat") {
      std::vector<ValuePtr> out{v_ctor("Nothing", v_unit())};
      for (auto& n : nats(2)) out.push_back(v_ctor("Just", n));
      return out;
    }
  }
  if (auto* p = as_pair_type(type)) {
    std::vector<ValuePtr> fs = enumerate_values(sigma, p->fst);
    std::vector<ValuePtr> ss = enumerate_values(sigma, p->snd);
    std::vector<ValuePtr> out;
    for (auto& f : fs) {
      for (auto& s : ss) out.push_back(v_pair(f, s));
    }
    return out;
  }
  std::vector<ValuePtr> out;
  generic_values(sigma, type, 3, out);
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

constexpr long kValidationFuel = 100000;
constexpr size_t kMaxInputTuples = 4096;

std::string show_value(const ValuePtr& v) { return pretty(value_to_expr(v)); }

std::optional<ValuePtr> apply_function(const HoleFilling& filling, const ResultPtr& fn,
                                       const std::vector<ValuePtr>& args) {
  try {
    EvalCtx ctx(kValidationFuel);
    ResultPtr r = fn;
    for (auto& a : args) {
      r = apply_result(filling, r, value_to_result(a), ctx);
    }
    return result_to_value(r);
  } catch (const FuelExhausted&) {
    return std::nullopt;
  }
}

}  // namespace

ValidationOutcome validate(const Elaborated& task, const Solution& solution,
                           const Elaborated& reference) {
  ValidationOutcome out;
  std::vector<TypePtr> arg_types;
  TypePtr t = task.last_def_type;
  while (auto* arrow = as_arrow(t)) {
    arg_types.push_back(arrow->dom);
    t = arrow->cod;
  }

  ResultPtr fn_task, fn_ref;
  try {
    EvalCtx ctx(kValidationFuel);
    fn_task = live_eval(nullptr, solution.filling, task.program.main, ctx);
    EvalCtx rctx(kValidationFuel);
    fn_ref = eval(nullptr, reference.program.main, rctx);
  } catch (const FuelExhausted&) {
    out.counterexample = "setup diverged";
    return out;
  }

  if (arg_types.empty()) {
    auto vt = result_to_value(fn_task);
    auto vr = result_to_value(fn_ref);
    if (vt && vr && value_equal(*vt, *vr)) {
      out.pass = true;
    } else {
      out.counterexample = "value mismatch";
    }
    return out;
  }

  std::vector<std::vector<ValuePtr>> domains;
  size_t total = 1;
  for (auto& at : arg_types) {
    domains.push_back(enumerate_values(task.sigma, at));
    total *= std::max<size_t>(domains.back().size(), 1);
  }

  std::vector<size_t> idx(arg_types.size(), 0);
  HoleFilling empty;
  size_t used = 0;
  while (true) {
    if (++used > kMaxInputTuples) break;
    std::vector<ValuePtr> args;
    for (size_t i = 0; i < idx.size(); ++i) args.push_back(domains[i][idx[i]]);
    auto got = apply_function(solution.filling, fn_task, args);
    auto want = apply_function(empty, fn_ref, args);
    if (!want) {
      // reference diverged; skip this input
    } else if (!got || !value_equal(*got, *want)) {
      std::string call = task.last_def;
      for (auto& a : args) call += " (" + show_value(a) + ")";
      out.counterexample =
          call + " = " + (got ? show_value(*got) : "<stuck>") + ", expected " +
          show_value(*want);
      return out;
    }
    size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  out.pass = true;
  return out;
}

ValidationOutcome validate_values(const Elaborated& task, const Solution& solution,
                                  const Elaborated& reference) {
  ValidationOutcome out;
  // One closed value hole compared against the reference's definition.
  if (task.delta.size() != 1) {
    out.counterexample = "value comparison supports exactly one hole";
    return out;
  }
  HoleId h = task.delta.begin()->first;
  try {
    EvalCtx ctx(kValidationFuel);
    ResultPtr want = eval(nullptr, reference.program.main, ctx);
    const ExprPtr* e = solution.filling.find(h);
    ExprPtr filled = e ? solution.filling.substitute(*e) : e_hole(h);
    EvalCtx fctx(kValidationFuel);
    ResultPtr got = live_eval(nullptr, solution.filling, filled, fctx);
    auto vg = result_to_value(got);
    auto vw = result_to_value(want);
    if (!vg || !vw || !value_equal(*vg, *vw)) {
      out.counterexample = "hole ??" + std::to_string(h) + " = " +
                           (vg ? show_value(*vg) : "<stuck>") + ", expected " +
                           (vw ? show_value(*vw) : "<stuck>");
      return out;
    }
  } catch (const FuelExhausted&) {
    out.counterexample = "evaluation diverged";
    return out;
  } catch (const std::exception& e) {
    out.counterexample = e.what();
    return out;
  }
  out.pass = true;
  return out;
}

// ---------------------------------------------------------------------------
// Task and suite running
// ---------------------------------------------------------------------------

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dirname(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

std::string basename(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

TaskResult run_task(const TaskSpec& spec, const std::string& base_dir,
                    const ForgeOptions& base) {
  TaskResult result;
  result.spec = spec;

  ForgeOptions opts = base;
  opts.solver.timeout_s = spec.timeout_s;
  opts.check_solutions = true;
  opts.only_recursive = spec.objective == "top1r";
  opts.top_n = 1;
  opts.max_solutions = opts.only_recursive ? 16 : 1;

  std::string source;
  try {
    source = read_file(base_dir + "/" + spec.file);
  } catch (const std::exception& e) {
    result.outcome = "error";
    result.detail = e.what();
    return result;
  }

  ForgeRun run = forge_source(source, opts);
  result.wall_s = run.report.wall_s;
  result.stage = run.report.stage;
  if (run.elab) result.examples = static_cast<int>(run.elab->program.asserts.size());

  switch (run.report.status) {
    case ForgeReport::Status::Timeout:
      result.outcome = "timeout";
      break;
    case ForgeReport::Status::Refuted:
      result.outcome = "refuted";
      result.detail = run.report.error;
      break;
    case ForgeReport::Status::NoSolution:
      result.outcome = "no-solution";
      break;
    case ForgeReport::Status::Error:
      result.outcome = "error";
      result.detail = run.report.error;
      break;
    case ForgeReport::Status::Solved: {
      // Pick the solution demanded by the objective and validate it.
      const Solution* chosen = nullptr;
      if (spec.objective == "top1r") {
        for (auto& sol : run.ranked) {
          if (solution_is_recursive(*run.elab, sol)) {
            chosen = &sol;
            break;
          }
        }
        if (!chosen) {
          result.outcome = "overspec";
          result.detail = "no recursive solution";
          break;
        }
      } else {
        chosen = &run.ranked.front();
      }

      std::string ref_path = base_dir + "/refs/" + basename(spec.file);
      Elaborated ref;
      try {
        SourceFile prelude = load_prelude();
        ref = desugar(parse(read_file(ref_path)), prelude);
      } catch (const std::exception& e) {
        result.outcome = "error";
        result.detail = std::string("reference: ") + e.what();
        break;
      } catch (const ParseError& e) {
        result.outcome = "error";
        result.detail = "reference: " + e.to_string();
        break;
      } catch (const ElabError& e) {
        result.outcome = "error";
        result.detail = "reference: " + e.to_string();
        break;
      }

      ValidationOutcome v = spec.objective == "top1v"
                                ? validate_values(*run.elab, *chosen, ref)
                                : validate(*run.elab, *chosen, ref);
      if (v.pass) {
        result.outcome = "pass";
      } else {
        result.outcome = "overspec";
        result.detail = v.counterexample;
      }
      break;
    }
  }

  const std::string& want = spec.expected;
  if (want == "pass") {
    result.matches_expected = result.outcome == "pass";
  } else if (want == "timeout/overspec" || want == "fail") {
    result.matches_expected = result.outcome == "timeout" || result.outcome == "overspec" ||
                              result.outcome == "no-solution";
  } else {
    result.matches_expected = result.outcome == want;
  }
  return result;
}

std::vector<TaskResult> run_suite(const std::string& manifest_path, const ForgeOptions& base,
                                  int jobs) {
  std::vector<TaskSpec> tasks = parse_manifest(manifest_path);
  std::string base_dir = dirname(manifest_path);
  std::vector<TaskResult> results(tasks.size());

  if (jobs <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) results[i] = run_task(tasks[i], base_dir, base);
    return results;
  }

  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      results[i] = run_task(tasks[i], base_dir, base);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

std::string suite_tsv(const std::vector<TaskResult>& results) {
  std::ostringstream out;
  out << "task\texperiment\tobjective\texpected\toutcome\tok\texamples\tstage\twall_s\tdetail\n";
  for (auto& r : results) {
    out << r.spec.file << '\t' << r.spec.experiment << '\t' << r.spec.objective << '\t'
        << r.spec.expected << '\t' << r.outcome << '\t' << (r.matches_expected ? "yes" : "NO")
        << '\t' << r.examples << '\t' << r.stage << '\t';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.wall_s);
    out << buf << '\t' << r.detail << '\n';
  }
  return out;
}

}  // namespace smyth
