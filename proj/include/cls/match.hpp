#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cls/pattern.hpp"
#include "cls/term.hpp"

namespace cls {

/// Kind-respecting variable binding. Domain is exactly the variable set of the
/// pattern it was built for.
struct Instantiation {
  std::map<std::string, Term> terms;
  std::map<std::string, Sequence> seqs;
  std::map<std::string, std::string> elems;

  bool operator==(const Instantiation& o) const = default;
  bool operator<(const Instantiation& o) const;
};

struct UnboundVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatchBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatchOptions {
  /// Cap on candidate assignments tried per call (component pairings, sequence
  /// splits, sub-multiset choices). AC matching is combinatorial; desk-scale
  /// inputs stay far below the default.
  std::size_t budget = 10000;
};

/// Pσ in canonical form. Throws UnboundVariableError if dom(σ) misses a
/// variable of p.
Term instantiate(const Pattern& p, const Instantiation& sigma);

/// All σ with dom(σ) = Var(p) and instantiate(p, σ) ≡ t; complete modulo
/// structural congruence, deduplicated, sorted.
std::vector<Instantiation> match(const Pattern& p, const Term& t, const MatchOptions& opts = {});

/// Context with one hole at parallel level: residual0 | <m1>( residual1 |
/// <m2>( ... <mk>( residual_k | [] ) ... ) ). No layers means residual0 | [].
struct Context {
  struct Layer {
    Sequence membrane;
    Term residual;
  };
  Term residual0;
  std::vector<Layer> layers;  // outermost first; hole inside layers.back()

  bool operator==(const Context& o) const;
  bool operator<(const Context& o) const;
};

Term plug(const Context& c, const Term& t);

/// plug(compose(o, i), t) = plug(o, plug(i, t)) for all t.
Context compose(const Context& outer, const Context& inner);

/// The fragment of c that decides typability of the hole: c itself when the
/// hole is under at most one membrane, otherwise the two innermost layers
/// with no top residual.
Context core(const Context& c);

/// c with the hole replaced by a term variable, as a pattern.
Pattern context_pattern(const Context& c, const std::string& hole_var);

struct Redex {
  Context context;
  Instantiation sigma;

  bool operator==(const Redex& o) const { return context == o.context && sigma == o.sigma; }
  bool operator<(const Redex& o) const {
    return !(context == o.context) ? context < o.context : sigma < o.sigma;
  }
};

/// All (C, σ) with plug(C, instantiate(lhs, σ)) ≡ t and instantiate(lhs, σ)
/// not ≡ eps. Hole positions range over every parallel sub-multiset at every
/// loop depth; sequence-internal positions are never redexes.
std::vector<Redex> find_redexes(const Pattern& lhs, const Term& t, const MatchOptions& opts = {});

}  // namespace cls
