#pragma once

#include <set>
#include <string>
#include <vector>

#include "cls/term.hpp"

namespace cls {

enum class VarKind { Term, Seq, Elem };

/// Pattern variable. The three kinds live in disjoint namespaces; surface
/// syntax marks them $X (term), ~x (sequence), ?x (element).
struct Var {
  VarKind kind = VarKind::Term;
  std::string name;

  std::string display() const;
};

int compare(const Var& a, const Var& b);
inline bool operator==(const Var& a, const Var& b) { return compare(a, b) == 0; }
inline bool operator!=(const Var& a, const Var& b) { return compare(a, b) != 0; }
inline bool operator<(const Var& a, const Var& b) { return compare(a, b) < 0; }

/// One position of a sequence pattern: an element, an element variable
/// (matches one element) or a sequence variable (matches any sequence).
struct PItem {
  enum class Kind { Elem, EVar, SVar };
  Kind kind = Kind::Elem;
  std::string name;
};

int compare(const PItem& a, const PItem& b);
inline bool operator==(const PItem& a, const PItem& b) { return compare(a, b) == 0; }

struct PComponent;

/// Pattern: a sorted multiset of sequence/loop pattern components plus a
/// sorted multiset of term variables (legal only at parallel level).
/// The empty pattern is eps. Loop membranes are stored as written; membrane
/// rotation is the matcher's job.
class Pattern {
 public:
  Pattern() = default;

  const std::vector<PComponent>& components() const { return comps_; }
  const std::vector<std::string>& term_vars() const { return tvars_; }
  bool empty() const { return comps_.empty() && tvars_.empty(); }

 private:
  friend Pattern make_pattern(std::vector<PComponent> comps, std::vector<std::string> tvars);
  std::vector<PComponent> comps_;
  std::vector<std::string> tvars_;
};

struct PComponent {
  enum class Kind { Seq, Loop };
  Kind kind = Kind::Seq;
  /// Seq payload (nonempty), or the loop membrane as written (may be empty).
  std::vector<PItem> items;
  /// Loop content; empty and unused for Seq components.
  Pattern content;
};

int compare(const PComponent& a, const PComponent& b);
int compare(const Pattern& a, const Pattern& b);
inline bool operator==(const Pattern& a, const Pattern& b) { return compare(a, b) == 0; }
inline bool operator<(const Pattern& a, const Pattern& b) { return compare(a, b) < 0; }

/// Sorts both multisets; drops Seq components with no items.
Pattern make_pattern(std::vector<PComponent> comps, std::vector<std::string> tvars);

std::set<Var> pattern_vars(const Pattern& p);
bool is_ground(const Pattern& p);

/// Canonical term denoted by a ground pattern. Throws std::logic_error if the
/// pattern contains variables.
Term to_term(const Pattern& p);

/// Injection of a canonical term as a (ground) pattern.
Pattern pattern_of(const Term& t);

std::string pretty(const Pattern& p);

}  // namespace cls
