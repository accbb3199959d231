#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cls/match.hpp"
#include "cls/pattern.hpp"
#include "cls/term.hpp"

namespace cls {

struct Rule {
  std::string name;
  Pattern lhs;
  Pattern rhs;
};

enum class RuleErrorKind { EmptyLhs, UnboundRhsVar };

struct RuleError {
  RuleErrorKind kind = RuleErrorKind::EmptyLhs;
  std::string variable;  // for UnboundRhsVar
  std::string message;
};

/// nullopt iff Var(rhs) ⊆ Var(lhs) and lhs is not the empty pattern.
std::optional<RuleError> validate_rule(const Rule& r);

/// (rule name, successor) pairs, deduplicated modulo congruence per rule,
/// sorted by (rule name, successor).
using Successor = std::pair<std::string, Term>;

std::vector<Successor> untyped_step(const std::vector<Rule>& rules, const Term& t,
                                    const MatchOptions& opts = {});

struct TransitionGraph {
  std::vector<Term> states;  // discovery order; root first
  struct Edge {
    std::size_t from = 0;
    std::string rule;
    std::size_t to = 0;
  };
  std::vector<Edge> edges;  // sorted by (from, rule, to), unique
  std::size_t root = 0;
  bool truncated = false;
};

using StepFn = std::function<std::vector<Successor>(const Term&)>;

/// Breadth-first closure of step from t0. Congruent states merge (canonical
/// storage). truncated is set when the state cap is reached or a state at the
/// depth bound is left unexpanded.
TransitionGraph explore(const StepFn& step, const Term& t0, std::size_t max_states,
                        std::size_t max_depth);

}  // namespace cls
