#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cls/infer.hpp"
#include "cls/parse.hpp"
#include "cls/rewrite.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kTypeFailure = 1;
constexpr int kParseFailure = 2;
constexpr int kSchemaVersion = 1;

struct CliError {
  int exit_code;
  std::string message;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kParseFailure, "cannot open file '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string describe(const cls::ParseError& e) {
  // what() already carries position and expectations
  return std::string("parse error: ") + e.what();
}

ordered_json json_type_set(const cls::TypeSet& s) {
  ordered_json a = ordered_json::array();
  for (const auto& t : s) a.push_back(t);
  return a;
}

ordered_json json_type_error(const cls::TypeError& e) {
  return ordered_json{{"kind", cls::type_error_kind_name(e.kind)},
                      {"where", e.where},
                      {"detail", e.detail}};
}

void collect_elements(const cls::Pattern& p, std::set<std::string>& out) {
  for (const auto& c : p.components()) {
    for (const auto& it : c.items) {
      if (it.kind == cls::PItem::Kind::Elem) out.insert(it.name);
    }
    if (c.kind == cls::PComponent::Kind::Loop) collect_elements(c.content, out);
  }
}

struct Bundle {
  cls::TypeEnv env;
  std::vector<cls::Rule> rules;
  cls::Term term;
};

/// Loads and cross-validates env + rules + term: every element mentioned by
/// the term or by either side of a rule must be declared in the environment.
Bundle load_bundle(const std::string& env_path, const std::string& rules_path,
                   const std::string& term_path) {
  Bundle b;
  b.env = cls::parse_env(slurp(env_path));
  b.rules = cls::parse_rules(slurp(rules_path));
  b.term = cls::parse_term(slurp(term_path));
  std::set<std::string> elems;
  collect_elements(cls::pattern_of(b.term), elems);
  for (const auto& r : b.rules) {
    collect_elements(r.lhs, elems);
    collect_elements(r.rhs, elems);
  }
  for (const auto& e : elems) {
    if (!b.env.type_of(e)) {
      throw CliError{kTypeFailure, "element '" + e + "' is not declared in the environment"};
    }
  }
  return b;
}

int cmd_fmt(const std::string& term_path) {
  cls::Term t = cls::parse_term(slurp(term_path));
  std::cout << cls::pretty(t) << "\n";
  return kOk;
}

int cmd_check(const std::string& env_path, const std::string& term_path, bool json) {
  cls::TypeEnv env = cls::parse_env(slurp(env_path));
  cls::Term t = cls::parse_term(slurp(term_path));
  auto r = cls::type_check(t, env);
  if (json) {
    ordered_json out{{"schema", kSchemaVersion}};
    if (r.ok()) {
      out["type"] = {{"present", json_type_set(r.type().present)},
                     {"required", json_type_set(r.type().required)}};
    } else {
      out["error"] = json_type_error(r.error());
    }
    std::cout << out.dump(2) << "\n";
  } else if (r.ok()) {
    std::cout << "P = " << cls::format_type_set(r.type().present)
              << "; R = " << cls::format_type_set(r.type().required) << "\n";
  } else {
    std::cerr << "error: " << cls::format_type_error(r.error()) << "\n";
  }
  return r.ok() ? kOk : kTypeFailure;
}

int cmd_infer(const std::string& env_path, const std::string& pattern_path, bool json) {
  cls::TypeEnv env = cls::parse_env(slurp(env_path));
  cls::Pattern p = cls::parse_pattern(slurp(pattern_path));
  auto r = cls::infer(p, env);
  if (json) {
    ordered_json out{{"schema", kSchemaVersion}};
    if (r.ok()) {
      ordered_json basis = ordered_json::array();
      for (const auto& [v, pr] : r.principal->basis) {
        basis.push_back({{"var", v.display()},
                         {"present", cls::print_expr(pr.present)},
                         {"required", cls::print_expr(pr.required)}});
      }
      out["basis"] = std::move(basis);
      out["type"] = {{"present", cls::print_expr(r.principal->type.present)},
                     {"required", cls::print_expr(r.principal->type.required)}};
      ordered_json cs = ordered_json::array();
      for (const auto& c : r.principal->constraints) cs.push_back(cls::print_constraint(c));
      out["constraints"] = std::move(cs);
    } else {
      out["error"] = json_type_error(*r.error);
    }
    std::cout << out.dump(2) << "\n";
    return r.ok() ? kOk : kTypeFailure;
  }
  if (!r.ok()) {
    std::cerr << "error: " << cls::format_type_error(*r.error) << "\n";
    return kTypeFailure;
  }
  if (!r.principal->basis.empty()) {
    std::cout << "basis:\n";
    for (const auto& [v, pr] : r.principal->basis) {
      std::cout << "  " << v.display() << " : (" << cls::print_expr(pr.present) << ", "
                << cls::print_expr(pr.required) << ")\n";
    }
  }
  std::cout << "type: (" << cls::print_expr(r.principal->type.present) << ", "
            << cls::print_expr(r.principal->type.required) << ")\n";
  if (!r.principal->constraints.empty()) {
    std::cout << "constraints:\n";
    for (const auto& c : r.principal->constraints) {
      std::cout << "  " << cls::print_constraint(c) << "\n";
    }
  }
  return kOk;
}

int cmd_step(const std::string& env_path, const std::string& rules_path,
             const std::string& term_path, bool untyped, bool json, std::size_t budget) {
  Bundle b = load_bundle(env_path, rules_path, term_path);
  cls::MatchOptions opts;
  opts.budget = budget;
  std::vector<cls::Successor> succs;
  if (untyped) {
    succs = cls::untyped_step(b.rules, b.term, opts);
  } else {
    succs = cls::typed_step(b.rules, b.term, b.env, opts);
  }
  if (json) {
    ordered_json out{{"schema", kSchemaVersion}};
    ordered_json arr = ordered_json::array();
    for (const auto& [rule, t] : succs) {
      arr.push_back({{"rule", rule}, {"term", cls::pretty(t)}});
    }
    out["successors"] = std::move(arr);
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& [rule, t] : succs) {
      std::cout << rule << ": " << cls::pretty(t) << "\n";
    }
  }
  return kOk;
}

void write_dot(const std::string& path, const cls::TransitionGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kTypeFailure, "cannot write DOT file '" + path + "'"};
  out << "digraph cls {\n  rankdir=LR;\n";
  for (const auto& s : g.states) {
    out << "  \"" << cls::pretty(s) << "\";\n";
  }
  for (const auto& e : g.edges) {
    out << "  \"" << cls::pretty(g.states[e.from]) << "\" -> \"" << cls::pretty(g.states[e.to])
        << "\" [label=\"" << e.rule << "\"];\n";
  }
  out << "}\n";
}

int cmd_run(const std::string& env_path, const std::string& rules_path,
            const std::string& term_path, std::size_t max_states, std::size_t max_depth,
            bool untyped, const std::string& dot_path, bool json, std::size_t budget) {
  Bundle b = load_bundle(env_path, rules_path, term_path);
  cls::MatchOptions opts;
  opts.budget = budget;
  cls::StepFn step;
  if (untyped) {
    step = [&](const cls::Term& t) { return cls::untyped_step(b.rules, t, opts); };
  } else {
    step = [&](const cls::Term& t) { return cls::typed_step(b.rules, t, b.env, opts); };
  }
  cls::TransitionGraph g = cls::explore(step, b.term, max_states, max_depth);
  if (!dot_path.empty()) write_dot(dot_path, g);
  if (json) {
    ordered_json out{{"schema", kSchemaVersion}};
    ordered_json states = ordered_json::array();
    for (const auto& s : g.states) states.push_back(cls::pretty(s));
    out["states"] = std::move(states);
    ordered_json edges = ordered_json::array();
    for (const auto& e : g.edges) {
      edges.push_back({{"from", e.from}, {"rule", e.rule}, {"to", e.to}});
    }
    out["edges"] = std::move(edges);
    out["root"] = g.root;
    out["truncated"] = g.truncated;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "states: " << g.states.size() << "\n"
              << "edges: " << g.edges.size() << "\n"
              << "truncated: " << (g.truncated ? "true" : "false") << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cls - typed rewriting for the Calculus of Looping Sequences"};
  app.require_subcommand(1);

  std::string env_path, rules_path, term_path, pattern_path, dot_path;
  bool json = false, untyped = false;
  std::size_t max_states = 1000, max_depth = 1000, budget = 10000;

  auto* fmt = app.add_subcommand("fmt", "Parse a term and print its canonical form");
  fmt->add_option("file", term_path, "term file")->required();

  auto* check = app.add_subcommand("check", "Type-check a term against an environment");
  check->add_option("--env", env_path, "environment file")->required();
  check->add_option("file", term_path, "term file")->required();
  check->add_flag("--json", json, "machine-readable output");

  auto* infer = app.add_subcommand("infer", "Infer the principal typing of a pattern");
  infer->add_option("--env", env_path, "environment file")->required();
  infer->add_option("file", pattern_path, "pattern file")->required();
  infer->add_flag("--json", json, "machine-readable output");

  auto* step = app.add_subcommand("step", "List one-step successors of a term");
  step->add_option("--env", env_path, "environment file")->required();
  step->add_option("--rules", rules_path, "rules file")->required();
  step->add_option("--term", term_path, "term file")->required();
  step->add_flag("--untyped", untyped, "use the untyped semantics");
  step->add_flag("--json", json, "machine-readable output");
  step->add_option("--match-budget", budget, "matching work budget per step");

  auto* run = app.add_subcommand("run", "Explore the reachable state space");
  run->add_option("--env", env_path, "environment file")->required();
  run->add_option("--rules", rules_path, "rules file")->required();
  run->add_option("--term", term_path, "term file")->required();
  run->add_option("--max-states", max_states, "state cap (default 1000)");
  run->add_option("--max-depth", max_depth, "depth cap (default 1000)");
  run->add_flag("--untyped", untyped, "use the untyped semantics");
  run->add_option("--dot", dot_path, "write the transition graph as DOT");
  run->add_flag("--json", json, "machine-readable output");
  run->add_option("--match-budget", budget, "matching work budget per step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(fmt)) return cmd_fmt(term_path);
    if (app.got_subcommand(check)) return cmd_check(env_path, term_path, json);
    if (app.got_subcommand(infer)) return cmd_infer(env_path, pattern_path, json);
    if (app.got_subcommand(step)) {
      return cmd_step(env_path, rules_path, term_path, untyped, json, budget);
    }
    if (app.got_subcommand(run)) {
      if (max_states == 0 || max_depth == 0) {
        std::cerr << "error: --max-states and --max-depth must be positive\n";
        return kTypeFailure;
      }
      return cmd_run(env_path, rules_path, term_path, max_states, max_depth, untyped, dot_path,
                     json, budget);
    }
  } catch (const cls::ParseError& e) {
    std::cerr << "error: " << describe(e) << "\n";
    return kParseFailure;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const cls::IllTypedStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTypeFailure;
  } catch (const cls::MatchBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTypeFailure;
  } catch (const cls::EnvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTypeFailure;
  }
  return kOk;
}
