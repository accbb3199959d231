#include "cls/match.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <utility>

namespace cls {

bool Instantiation::operator<(const Instantiation& o) const {
  if (terms != o.terms) return terms < o.terms;
  if (seqs != o.seqs) return seqs < o.seqs;
  return elems < o.elems;
}

namespace {

const Term& lookup_term(const Instantiation& s, const std::string& name) {
  auto it = s.terms.find(name);
  if (it == s.terms.end()) throw UnboundVariableError("unbound variable $" + name);
  return it->second;
}

const Sequence& lookup_seq(const Instantiation& s, const std::string& name) {
  auto it = s.seqs.find(name);
  if (it == s.seqs.end()) throw UnboundVariableError("unbound variable ~" + name);
  return it->second;
}

const std::string& lookup_elem(const Instantiation& s, const std::string& name) {
  auto it = s.elems.find(name);
  if (it == s.elems.end()) throw UnboundVariableError("unbound variable ?" + name);
  return it->second;
}

void splice_items(const std::vector<PItem>& items, const Instantiation& sigma, Sequence& out) {
  for (const auto& it : items) {
    switch (it.kind) {
      case PItem::Kind::Elem: out.push_back(it.name); break;
      case PItem::Kind::EVar: out.push_back(lookup_elem(sigma, it.name)); break;
      case PItem::Kind::SVar: {
        const Sequence& v = lookup_seq(sigma, it.name);
        out.insert(out.end(), v.begin(), v.end());
        break;
      }
    }
  }
}

}  // namespace

Term instantiate(const Pattern& p, const Instantiation& sigma) {
  std::vector<Component> comps;
  for (const auto& pc : p.components()) {
    Sequence s;
    splice_items(pc.items, sigma, s);
    if (pc.kind == PComponent::Kind::Seq) {
      push_seq_component(comps, std::move(s));
    } else {
      push_loop_component(comps, std::move(s), instantiate(pc.content, sigma));
    }
  }
  Term acc = make_term(std::move(comps));
  for (const auto& x : p.term_vars()) acc = par(acc, lookup_term(sigma, x));
  return acc;
}

namespace {

struct Gauge {
  std::size_t left;
  void tick() {
    if (left == 0) throw MatchBudgetExceeded("match budget exceeded");
    --left;
  }
};

using Cont = std::function<void(const Instantiation&)>;

/// Backtracking AC matcher. Pattern components are assigned to distinct term
/// components (or vanish to eps); leftover components are distributed over
/// term variables as sub-multisets. All bindings are checked for consistency
/// against the shared environment; branching copies the environment.
struct Matcher {
  Gauge& gauge;

  void match_parallel(const Pattern& p, const std::vector<Component>& comps,
                      const Instantiation& env, const Cont& k) {
    std::vector<char> used(comps.size(), 0);
    assign(p, comps, used, 0, env, k);
  }

  void assign(const Pattern& p, const std::vector<Component>& comps, std::vector<char>& used,
              std::size_t idx, const Instantiation& env, const Cont& k) {
    const auto& pcs = p.components();
    if (idx == pcs.size()) {
      std::vector<Component> remaining;
      for (std::size_t j = 0; j < comps.size(); ++j) {
        if (!used[j]) remaining.push_back(comps[j]);
      }
      distribute(p.term_vars(), 0, remaining, env, k);
      return;
    }
    const PComponent& pc = pcs[idx];
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (used[j]) continue;
      // equal runs are adjacent (sorted); only the first free copy matters
      if (j > 0 && !used[j - 1] && compare(comps[j], comps[j - 1]) == 0) continue;
      gauge.tick();
      match_component(pc, comps[j], env, [&](const Instantiation& env2) {
        used[j] = 1;
        assign(p, comps, used, idx + 1, env2, k);
        used[j] = 0;
      });
    }
    vanish(pc, env, [&](const Instantiation& env2) { assign(p, comps, used, idx + 1, env2, k); });
  }

  void match_component(const PComponent& pc, const Component& c, const Instantiation& env,
                       const Cont& k) {
    if (pc.kind == PComponent::Kind::Seq) {
      if (c.kind != Component::Kind::Seq) return;
      match_items(pc.items, c.seq, 0, 0, env, k);
      return;
    }
    if (c.kind != Component::Kind::Loop) return;
    std::set<Sequence> rotations;
    Sequence rot = c.seq;
    rotations.insert(rot);
    for (std::size_t r = 1; r < c.seq.size(); ++r) {
      std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      rotations.insert(rot);
    }
    for (const auto& membrane : rotations) {
      gauge.tick();
      match_items(pc.items, membrane, 0, 0, env, [&](const Instantiation& env2) {
        match_parallel(pc.content, c.content.components(), env2, k);
      });
    }
  }

  void match_items(const std::vector<PItem>& items, const Sequence& elems, std::size_t pi,
                   std::size_t ei, const Instantiation& env, const Cont& k) {
    if (pi == items.size()) {
      if (ei == elems.size()) k(env);
      return;
    }
    const PItem& it = items[pi];
    switch (it.kind) {
      case PItem::Kind::Elem:
        if (ei < elems.size() && elems[ei] == it.name) {
          match_items(items, elems, pi + 1, ei + 1, env, k);
        }
        return;
      case PItem::Kind::EVar: {
        if (ei >= elems.size()) return;
        auto bound = env.elems.find(it.name);
        if (bound != env.elems.end()) {
          if (bound->second != elems[ei]) return;
          match_items(items, elems, pi + 1, ei + 1, env, k);
          return;
        }
        Instantiation env2 = env;
        env2.elems.emplace(it.name, elems[ei]);
        match_items(items, elems, pi + 1, ei + 1, env2, k);
        return;
      }
      case PItem::Kind::SVar: {
        auto bound = env.seqs.find(it.name);
        if (bound != env.seqs.end()) {
          const Sequence& v = bound->second;
          if (ei + v.size() > elems.size()) return;
          if (!std::equal(v.begin(), v.end(), elems.begin() + ei)) return;
          match_items(items, elems, pi + 1, ei + v.size(), env, k);
          return;
        }
        for (std::size_t len = 0; len + ei <= elems.size(); ++len) {
          gauge.tick();
          Instantiation env2 = env;
          env2.seqs.emplace(it.name, Sequence(elems.begin() + ei, elems.begin() + ei + len));
          match_items(items, elems, pi + 1, ei + len, env2, k);
        }
        return;
      }
    }
  }

  /// Only a component that is a single bare sequence variable may instantiate
  /// to eps; every other component shape must consume a term component. In
  /// particular loop components never vanish, so rules mentioning a loop only
  /// fire where a real compartment exists.
  void vanish(const PComponent& pc, const Instantiation& env, const Cont& k) {
    if (pc.kind != PComponent::Kind::Seq || pc.items.size() != 1 ||
        pc.items[0].kind != PItem::Kind::SVar) {
      return;
    }
    auto bound = env.seqs.find(pc.items[0].name);
    if (bound != env.seqs.end()) {
      if (bound->second.empty()) k(env);
      return;
    }
    Instantiation env2 = env;
    env2.seqs.emplace(pc.items[0].name, Sequence{});
    k(env2);
  }

  void distribute(const std::vector<std::string>& tvars, std::size_t vi,
                  const std::vector<Component>& remaining, const Instantiation& env,
                  const Cont& k) {
    if (vi == tvars.size()) {
      if (remaining.empty()) k(env);
      return;
    }
    // multiplicity of this variable in the pattern's parallel multiset
    std::size_t vj = vi;
    while (vj < tvars.size() && tvars[vj] == tvars[vi]) ++vj;
    const std::size_t mult = vj - vi;
    const std::string& name = tvars[vi];

    auto bound = env.terms.find(name);
    if (bound != env.terms.end()) {
      std::vector<Component> rest;
      if (!subtract_copies(remaining, bound->second.components(), mult, rest)) return;
      distribute(tvars, vj, rest, env, k);
      return;
    }

    std::vector<std::pair<Component, std::size_t>> runs = run_lengths(remaining);
    std::vector<std::size_t> take(runs.size(), 0);
    enumerate_value(tvars, vi, vj, mult, name, runs, take, 0, env, k);
  }

  void enumerate_value(const std::vector<std::string>& tvars, std::size_t vi, std::size_t vj,
                       std::size_t mult, const std::string& name,
                       const std::vector<std::pair<Component, std::size_t>>& runs,
                       std::vector<std::size_t>& take, std::size_t ri, const Instantiation& env,
                       const Cont& k) {
    if (ri == runs.size()) {
      gauge.tick();
      std::vector<Component> value, rest;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t c = 0; c < take[r]; ++c) value.push_back(runs[r].first);
        for (std::size_t c = 0; c < runs[r].second - mult * take[r]; ++c) {
          rest.push_back(runs[r].first);
        }
      }
      Instantiation env2 = env;
      env2.terms.emplace(name, make_term(std::move(value)));
      distribute(tvars, vj, rest, env2, k);
      return;
    }
    for (std::size_t c = 0; mult * c <= runs[ri].second; ++c) {
      take[ri] = c;
      enumerate_value(tvars, vi, vj, mult, name, runs, take, ri + 1, env, k);
    }
  }

  static std::vector<std::pair<Component, std::size_t>> run_lengths(
      const std::vector<Component>& comps) {
    std::vector<std::pair<Component, std::size_t>> runs;
    for (const auto& c : comps) {
      if (!runs.empty() && compare(runs.back().first, c) == 0) {
        ++runs.back().second;
      } else {
        runs.emplace_back(c, 1);
      }
    }
    return runs;
  }

  /// remaining minus `mult` copies of each component of `value`; false if the
  /// copies are not contained.
  static bool subtract_copies(const std::vector<Component>& remaining,
                              const std::vector<Component>& value, std::size_t mult,
                              std::vector<Component>& rest) {
    auto rem_runs = run_lengths(remaining);
    for (const auto& v : value) {
      bool found = false;
      for (auto& run : rem_runs) {
        if (compare(run.first, v) == 0) {
          if (run.second < mult) return false;
          run.second -= mult;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    rest.clear();
    for (const auto& run : rem_runs) {
      for (std::size_t c = 0; c < run.second; ++c) rest.push_back(run.first);
    }
    return true;
  }
};

}  // namespace

std::vector<Instantiation> match(const Pattern& p, const Term& t, const MatchOptions& opts) {
  Gauge gauge{opts.budget};
  Matcher m{gauge};
  std::set<Instantiation> out;
  m.match_parallel(p, t.components(), Instantiation{},
                   [&](const Instantiation& env) { out.insert(env); });
  return {out.begin(), out.end()};
}

bool Context::operator==(const Context& o) const {
  if (!(residual0 == o.residual0) || layers.size() != o.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].membrane != o.layers[i].membrane) return false;
    if (!(layers[i].residual == o.layers[i].residual)) return false;
  }
  return true;
}

bool Context::operator<(const Context& o) const {
  if (int c = compare(residual0, o.residual0); c != 0) return c < 0;
  if (layers.size() != o.layers.size()) return layers.size() < o.layers.size();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (int c = compare(layers[i].membrane, o.layers[i].membrane); c != 0) return c < 0;
    if (int c = compare(layers[i].residual, o.layers[i].residual); c != 0) return c < 0;
  }
  return false;
}

Term plug(const Context& c, const Term& t) {
  Term cur = t;
  for (auto it = c.layers.rbegin(); it != c.layers.rend(); ++it) {
    Term inner = par(it->residual, cur);
    std::vector<Component> comps;
    push_loop_component(comps, it->membrane, std::move(inner));
    cur = make_term(std::move(comps));
  }
  return par(c.residual0, cur);
}

Context compose(const Context& outer, const Context& inner) {
  Context r = outer;
  if (r.layers.empty()) {
    r.residual0 = par(r.residual0, inner.residual0);
  } else {
    r.layers.back().residual = par(r.layers.back().residual, inner.residual0);
  }
  r.layers.insert(r.layers.end(), inner.layers.begin(), inner.layers.end());
  return r;
}

Context core(const Context& c) {
  if (c.layers.size() <= 1) return c;
  Context r;
  r.layers.push_back(c.layers[c.layers.size() - 2]);
  r.layers.push_back(c.layers.back());
  return r;
}

Pattern context_pattern(const Context& c, const std::string& hole_var) {
  const Term& deepest = c.layers.empty() ? c.residual0 : c.layers.back().residual;
  Pattern cur = make_pattern(pattern_of(deepest).components(), {hole_var});
  for (std::size_t i = c.layers.size(); i-- > 0;) {
    PComponent lp;
    lp.kind = PComponent::Kind::Loop;
    for (const auto& e : c.layers[i].membrane) lp.items.push_back({PItem::Kind::Elem, e});
    lp.content = cur;
    const Term& residual = i == 0 ? c.residual0 : c.layers[i - 1].residual;
    std::vector<PComponent> comps = pattern_of(residual).components();
    comps.push_back(std::move(lp));
    cur = make_pattern(std::move(comps), {});
  }
  return cur;
}

namespace {

struct RedexWalker {
  const Pattern& lhs;
  Gauge& gauge;
  Matcher& matcher;
  std::set<Redex>& out;

  void set_current_residual(Context& c, Term t) {
    if (c.layers.empty()) {
      c.residual0 = std::move(t);
    } else {
      c.layers.back().residual = std::move(t);
    }
  }

  void walk(const Context& prefix, const std::vector<Component>& cur) {
    auto runs = Matcher::run_lengths(cur);
    std::vector<std::size_t> take(runs.size(), 0);
    enumerate_holes(prefix, runs, take, 0);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (cur[j].kind != Component::Kind::Loop) continue;
      if (j > 0 && compare(cur[j], cur[j - 1]) == 0) continue;
      std::vector<Component> rest;
      rest.reserve(cur.size() - 1);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (i != j) rest.push_back(cur[i]);
      }
      Context next = prefix;
      set_current_residual(next, make_term(std::move(rest)));
      next.layers.push_back({cur[j].seq, Term{}});
      walk(next, cur[j].content.components());
    }
  }

  void enumerate_holes(const Context& prefix,
                       const std::vector<std::pair<Component, std::size_t>>& runs,
                       std::vector<std::size_t>& take, std::size_t ri) {
    if (ri == runs.size()) {
      std::vector<Component> redex_comps, residual;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t c = 0; c < take[r]; ++c) redex_comps.push_back(runs[r].first);
        for (std::size_t c = take[r]; c < runs[r].second; ++c) residual.push_back(runs[r].first);
      }
      if (redex_comps.empty()) return;  // an instantiated lhs is never eps
      gauge.tick();
      Context ctx = prefix;
      set_current_residual(ctx, make_term(std::move(residual)));
      matcher.match_parallel(lhs, redex_comps, Instantiation{},
                             [&](const Instantiation& env) { out.insert({ctx, env}); });
      return;
    }
    for (std::size_t c = 0; c <= runs[ri].second; ++c) {
      take[ri] = c;
      enumerate_holes(prefix, runs, take, ri + 1);
    }
  }
};

}  // namespace

std::vector<Redex> find_redexes(const Pattern& lhs, const Term& t, const MatchOptions& opts) {
  Gauge gauge{opts.budget};
  Matcher m{gauge};
  std::set<Redex> out;
  RedexWalker w{lhs, gauge, m, out};
  w.walk(Context{}, t.components());
  return {out.begin(), out.end()};
}

}  // namespace cls
