// Command-line front end. Subcommands are added as the toolkit grows;
// exit codes: 0 = success / property holds, 1 = property fails or type
// error, 2 = usage or parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sess2gts/json_export.hpp"
#include "sess2gts/parse.hpp"
#include "sess2gts/print.hpp"
#include "sess2gts/generic_dynamics.hpp"
#include "sess2gts/gts_types.hpp"
#include "sess2gts/session_dynamics.hpp"
#include "sess2gts/session_typing.hpp"

using namespace sess2gts;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_parse(const std::string& path, const std::string& kind, bool json) {
  std::string src = slurp(path);
  if (kind == "session") {
    auto p = parse_session_proc(src);
    std::cout << (json ? to_json(p) : render(p)) << "\n";
  } else if (kind == "generic") {
    auto p = parse_generic_proc(src);
    std::cout << (json ? to_json(p) : render(p)) << "\n";
  } else if (kind == "stype") {
    auto t = parse_session_type(src);
    std::cout << (json ? to_json(t) : render(t)) << "\n";
  } else if (kind == "ptype") {
    auto t = parse_process_type(src);
    std::cout << (json ? to_json(t) : render(t)) << "\n";
  } else { // env
    auto e = parse_type_env(src);
    std::cout << (json ? to_json(e) : render(e)) << "\n";
  }
  return 0;
}

// Breadth-first reduct listing: every step prints `--[tag]--> reduct`,
// states deduplicated by their canonical rendering.
template <class Proc, class StepFn>
int reduce_loop(Proc p, int steps, StepFn step) {
  std::vector<Proc> frontier{p};
  std::set<std::string> seen{render(p)};
  for (int s = 0; s < steps && !frontier.empty(); ++s) {
    std::vector<Proc> next;
    for (const auto& q : frontier) {
      for (const auto& [r, q2] : step(q)) {
        std::string key = render(q2);
        std::cout << "--[" << redex_str(r) << "]--> " << key << "\n";
        if (seen.insert(key).second) next.push_back(q2);
      }
    }
    frontier = std::move(next);
  }
  return 0;
}

int run_reduce(const std::string& path, int steps, const std::string& kind) {
  std::string src = slurp(path);
  if (kind == "generic")
    return reduce_loop(parse_generic_proc(src), steps,
                       [](const GenericProcPtr& q) { return reduce_generic(q); });
  return reduce_loop(parse_session_proc(src), steps,
                     [](const SessionProcPtr& q) { return reduce_session(q); });
}

int run_check(const std::string& path, const std::string& env_path) {
  auto p = parse_session_proc(slurp(path));
  TypeEnv env;
  if (!env_path.empty()) env = parse_type_env(slurp(env_path));
  auto r = typecheck_session(env, p);
  if (!r.ok) {
    std::cout << "type error: " << r.error << "\n";
    return 1;
  }
  std::cout << render_derivation(r.derivation);
  return 0;
}

// Deterministic run: always follow the first redex.
template <class Proc, class StepFn>
int trace_loop(Proc p, int max_steps, StepFn step) {
  for (int s = 0; s < max_steps; ++s) {
    auto steps = step(p);
    if (steps.empty()) break;
    p = steps.front().second;
    std::cout << "--[" << redex_str(steps.front().first) << "]--> "
              << render(p) << "\n";
  }
  return 0;
}

int run_trace(const std::string& path, int max_steps, const std::string& kind) {
  std::string src = slurp(path);
  if (kind == "generic")
    return trace_loop(parse_generic_proc(src), max_steps,
                      [](const GenericProcPtr& q) { return reduce_generic(q); });
  return trace_loop(parse_session_proc(src), max_steps,
                    [](const SessionProcPtr& q) { return reduce_session(q); });
}

// `--bound` wins over SESS2GTS_BOUND; both use "depth=N,states=M,unfold=K".
ExplorationBound effective_bound(const std::string& flag) {
  if (!flag.empty()) return parse_bound(flag);
  if (const char* env = std::getenv("SESS2GTS_BOUND")) return parse_bound(env);
  return {};
}

int run_verdict(const std::string& path, const std::string& bound, bool lin) {
  auto t = parse_process_type(slurp(path));
  auto b = effective_bound(bound);
  auto v = lin ? is_lin(t, b) : is_wf(t, b);
  std::cout << verdict_str(v) << "\n";
  return v.v == Verdict::Yes ? 0 : 1;
}

int run_sub(const std::string& left, const std::string& right,
            const std::string& kind) {
  bool holds;
  if (kind == "session")
    holds = subtype_session(parse_session_type(slurp(left)),
                            parse_session_type(slurp(right)));
  else
    holds = subtype_generic(parse_process_type(slurp(left)),
                            parse_process_type(slurp(right)));
  std::cout << (holds ? "true" : "false") << "\n";
  return holds ? 0 : 1;
}

int run_gcheck(const std::string& path, const std::string& env_path,
               const std::string& ann_path, const std::string& bound) {
  auto p = parse_generic_proc(slurp(path));
  ProcessTypePtr env = env_path.empty() ? pt_zero()
                                        : parse_process_type(slurp(env_path));
  GtsAnnotations ann;
  if (!ann_path.empty()) ann = parse_annotations(p, slurp(ann_path));
  auto r = typecheck_generic(env, p, ann, effective_bound(bound));
  if (!r.ok) {
    std::cout << "type error: " << r.error << "\n";
    return 1;
  }
  std::cout << "well-typed\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"session-to-generic process toolkit"};
  app.require_subcommand(1);

  std::string in_path = "-";
  std::string kind = "session";
  bool as_json = false;

  auto* parse_cmd = app.add_subcommand("parse", "parse a term and reprint it");
  parse_cmd->add_option("input", in_path, "input file, or - for stdin");
  parse_cmd->add_option("--kind", kind, "session|generic|stype|ptype|env")
      ->check(CLI::IsMember({"session", "generic", "stype", "ptype", "env"}));
  parse_cmd->add_flag("--json", as_json, "emit the AST as JSON");

  std::string check_path = "-";
  std::string check_env;
  auto* check_cmd =
      app.add_subcommand("check", "typecheck a session process");
  check_cmd->add_option("input", check_path, "input file, or - for stdin");
  check_cmd->add_option("--env", check_env,
                        "type environment file (default empty)");

  std::string red_path = "-";
  int red_steps = 1;
  std::string red_kind = "session";
  auto* reduce_cmd =
      app.add_subcommand("reduce", "list reducts, breadth-first");
  reduce_cmd->add_option("input", red_path, "input file, or - for stdin");
  reduce_cmd->add_option("--steps", red_steps, "expansion depth (default 1)")
      ->check(CLI::PositiveNumber);
  reduce_cmd->add_option("--kind", red_kind, "session|generic")
      ->check(CLI::IsMember({"session", "generic"}));

  std::string trace_path = "-";
  int trace_max = 64;
  std::string trace_kind = "session";
  auto* trace_cmd =
      app.add_subcommand("trace", "follow the first redex until stuck");
  trace_cmd->add_option("input", trace_path, "input file, or - for stdin");
  trace_cmd->add_option("--max", trace_max, "step cap (default 64)")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_option("--kind", trace_kind, "session|generic")
      ->check(CLI::IsMember({"session", "generic"}));

  std::string lin_path = "-";
  std::string lin_bound;
  auto* lin_cmd =
      app.add_subcommand("lin", "linearity verdict for a process type");
  lin_cmd->add_option("input", lin_path, "input file, or - for stdin");
  lin_cmd->add_option("--bound", lin_bound, "depth=N,states=M,unfold=K");

  std::string wf_path = "-";
  std::string wf_bound;
  auto* wf_cmd =
      app.add_subcommand("wf", "well-formedness verdict for a process type");
  wf_cmd->add_option("input", wf_path, "input file, or - for stdin");
  wf_cmd->add_option("--bound", wf_bound, "depth=N,states=M,unfold=K");

  std::string sub_left, sub_right;
  std::string sub_kind = "generic";
  auto* sub_cmd = app.add_subcommand("sub", "subtyping check: LEFT <= RIGHT");
  sub_cmd->add_option("left", sub_left, "left type file")->required();
  sub_cmd->add_option("right", sub_right, "right type file")->required();
  sub_cmd->add_option("--kind", sub_kind, "generic|session")
      ->check(CLI::IsMember({"generic", "session"}));

  std::string gcheck_path = "-";
  std::string gcheck_env, gcheck_ann, gcheck_bound;
  auto* gcheck_cmd = app.add_subcommand(
      "gcheck", "typecheck a generic process against a process type");
  gcheck_cmd->add_option("input", gcheck_path, "input file, or - for stdin");
  gcheck_cmd->add_option("--env", gcheck_env,
                         "process type environment file (default 0)");
  gcheck_cmd->add_option("--ann", gcheck_ann,
                         "restriction annotation file (default none)");
  gcheck_cmd->add_option("--bound", gcheck_bound, "depth=N,states=M,unfold=K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (parse_cmd->parsed()) return run_parse(in_path, kind, as_json);
    if (check_cmd->parsed()) return run_check(check_path, check_env);
    if (reduce_cmd->parsed()) return run_reduce(red_path, red_steps, red_kind);
    if (trace_cmd->parsed()) return run_trace(trace_path, trace_max, trace_kind);
    if (lin_cmd->parsed()) return run_verdict(lin_path, lin_bound, true);
    if (wf_cmd->parsed()) return run_verdict(wf_path, wf_bound, false);
    if (sub_cmd->parsed()) return run_sub(sub_left, sub_right, sub_kind);
    if (gcheck_cmd->parsed())
      return run_gcheck(gcheck_path, gcheck_env, gcheck_ann, gcheck_bound);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
