#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cls {

/// A sequence of alphabet elements; the empty vector is the empty sequence eps.
/// Element names match [a-z][a-zA-Z0-9_']* and are identities.
using Sequence = std::vector<std::string>;

struct Component;

/// Ground CLS term in structural-congruence normal form: a sorted multiset of
/// components. The empty multiset is eps.
///
/// Invariants (enforced by make_term / normalize, assumed everywhere else):
///   - no Seq component has an empty sequence;
///   - no component is loop(eps){eps};
///   - every loop membrane is stored in least-rotation form;
///   - components are sorted under compare(Component, Component).
class Term {
 public:
  Term() = default;

  const std::vector<Component>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }

  /// Node count: element occurrences plus loop operators.
  std::size_t size() const;

 private:
  friend Term make_term(std::vector<Component> comps);
  std::vector<Component> comps_;
};

struct Component {
  enum class Kind { Seq, Loop };
  Kind kind = Kind::Seq;
  /// Seq payload, or the loop membrane (least rotation; may be empty).
  Sequence seq;
  /// Loop content; empty and unused for Seq components.
  Term content;
};

int compare(const Sequence& a, const Sequence& b);
int compare(const Component& a, const Component& b);
int compare(const Term& a, const Term& b);

inline bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
inline bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
inline bool operator==(const Component& a, const Component& b) { return compare(a, b) == 0; }
inline bool operator<(const Component& a, const Component& b) { return compare(a, b) < 0; }

/// Sorts the components; callers must pass individually canonical components.
Term make_term(std::vector<Component> comps);

/// The concatenation a | b as a canonical term.
Term par(const Term& a, const Term& b);

/// Seq component; nothing if the sequence is empty.
bool push_seq_component(std::vector<Component>& out, Sequence s);

/// Loop component with the membrane put into least-rotation form; nothing if
/// both membrane and content are empty (loop(eps){eps} is congruent to eps).
bool push_loop_component(std::vector<Component>& out, Sequence membrane, Term content);

Sequence least_rotation(Sequence s);

/// Unnormalized term tree as produced by a parser or built programmatically.
/// Items may be empty sequences (written "eps"); nothing is sorted.
struct RawItem;
struct RawTerm {
  std::vector<RawItem> items;
};
struct RawItem {
  enum class Kind { Seq, Loop };
  Kind kind = Kind::Seq;
  Sequence seq;  // Seq payload, or the membrane as written
  RawTerm content;
};

/// Unique canonical representative of the input's congruence class; idempotent
/// in the sense that normalizing a canonical term's raw image is the identity.
Term normalize(const RawTerm& raw);

/// Structural congruence, decided as equality of canonical forms.
bool congruent(const Term& a, const Term& b);
bool congruent(const RawTerm& a, const RawTerm& b);

std::string pretty(const Term& t);

}  // namespace cls
