#include "cls/rewrite.hpp"

#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace cls {

std::optional<RuleError> validate_rule(const Rule& r) {
  if (r.lhs.empty()) {
    return RuleError{RuleErrorKind::EmptyLhs, "", "left side must not be the empty pattern"};
  }
  auto bound = pattern_vars(r.lhs);
  for (const auto& v : pattern_vars(r.rhs)) {
    if (!bound.count(v)) {
      return RuleError{RuleErrorKind::UnboundRhsVar, v.display(),
                       "variable " + v.display() + " on the right side is not bound on the left"};
    }
  }
  return std::nullopt;
}

std::vector<Successor> untyped_step(const std::vector<Rule>& rules, const Term& t,
                                    const MatchOptions& opts) {
  std::set<Successor> out;
  for (const auto& r : rules) {
    for (const auto& rx : find_redexes(r.lhs, t, opts)) {
      out.insert({r.name, plug(rx.context, instantiate(r.rhs, rx.sigma))});
    }
  }
  return {out.begin(), out.end()};
}

TransitionGraph explore(const StepFn& step, const Term& t0, std::size_t max_states,
                        std::size_t max_depth) {
  TransitionGraph g;
  std::map<Term, std::size_t> index;
  std::deque<std::pair<std::size_t, std::size_t>> frontier;  // (state, depth)
  g.states.push_back(t0);
  index.emplace(t0, 0);
  g.root = 0;
  frontier.push_back({0, 0});
  bool depth_blocked = false;
  bool dropped = false;
  std::set<std::tuple<std::size_t, std::string, std::size_t>> edges;

  while (!frontier.empty()) {
    auto [si, depth] = frontier.front();
    frontier.pop_front();
    if (depth == max_depth) {
      depth_blocked = true;
      continue;
    }
    Term cur = g.states[si];  // copy: states may grow while expanding
    for (const auto& [rule, succ] : step(cur)) {
      std::size_t ti;
      auto it = index.find(succ);
      if (it != index.end()) {
        ti = it->second;
      } else {
        if (g.states.size() >= max_states) {
          dropped = true;
          continue;  // edge dropped with its target; truncated reports the loss
        }
        ti = g.states.size();
        g.states.push_back(succ);
        index.emplace(succ, ti);
        frontier.push_back({ti, depth + 1});
      }
      edges.insert({si, rule, ti});
    }
  }

  for (const auto& [from, rule, to] : edges) g.edges.push_back({from, rule, to});
  g.truncated = depth_blocked || dropped || g.states.size() >= max_states;
  return g;
}

}  // namespace cls
