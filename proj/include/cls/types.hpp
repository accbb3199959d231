#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "cls/match.hpp"
#include "cls/pattern.hpp"
#include "cls/term.hpp"

namespace cls {

using TypeName = std::string;
using TypeSet = std::set<TypeName>;

struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownBasicTypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotCompatibleError : std::logic_error {
  using std::logic_error::logic_error;
};
struct InvalidBasisError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Γ plus the per-basic-type required set R_t and excluded set E_t.
/// Immutable once loaded; add_* enforce t ∉ R_t ∪ E_t, R_t ∩ E_t = ∅ and
/// declaration uniqueness. References to not-yet-declared types are allowed
/// while building; check_references() closes the env.
class TypeEnv {
 public:
  void add_type(const TypeName& t, TypeSet required, TypeSet excluded);
  void add_element(const std::string& elem, const TypeName& t);
  /// Throws EnvError if any R_t/E_t member is undeclared.
  void check_references() const;

  bool has_type(const TypeName& t) const { return required_.count(t) != 0; }
  std::optional<TypeName> type_of(const std::string& elem) const;
  const TypeSet& required_of(const TypeName& t) const;  // throws UnknownBasicTypeError
  const TypeSet& excluded_of_type(const TypeName& t) const;

  const std::map<std::string, TypeName>& elements() const { return elem_types_; }
  const std::map<TypeName, TypeSet>& types() const { return required_; }

 private:
  std::map<std::string, TypeName> elem_types_;
  std::map<TypeName, TypeSet> required_;
  std::map<TypeName, TypeSet> excluded_;
};

/// (P, R): basic types present at top level and still required. The excluded
/// component is always derived as excluded_of(P) and never stored.
struct PrType {
  TypeSet present;
  TypeSet required;

  bool operator==(const PrType& o) const = default;
  bool operator<(const PrType& o) const {
    return present != o.present ? present < o.present : required < o.required;
  }
};

TypeSet excluded_of(const TypeSet& present, const TypeEnv& env);
bool well_formed(const PrType& t, const TypeEnv& env);
bool compatible(const PrType& a, const PrType& b, const TypeEnv& env);
PrType conjunction(const PrType& a, const PrType& b, const TypeEnv& env);  // throws NotCompatibleError

std::string format_type_set(const TypeSet& s);
std::string format_pr_type(const PrType& t);

/// Basis Δ: well-formed types for pattern variables; element-variable entries
/// must have the shape ({t}, R_t).
class Basis {
 public:
  void insert(const Var& v, const PrType& t, const TypeEnv& env);  // throws InvalidBasisError
  const PrType* find(const Var& v) const;
  const std::map<Var, PrType>& entries() const { return entries_; }

 private:
  std::map<Var, PrType> entries_;
};

enum class TypeErrorKind { UnknownElement, UnboundVariable, Incompatible, RequirementNotProvided };

struct TypeError {
  TypeErrorKind kind = TypeErrorKind::UnknownElement;
  /// Path of the first violation under left-to-right, inside-out traversal;
  /// "" is the whole pattern, "[i]" the i-th parallel child in canonical
  /// order, ".mem[j]" a membrane position, ".content" a loop body.
  std::string where;
  std::string detail;
};

std::string format_type_error(const TypeError& e);
std::string type_error_kind_name(TypeErrorKind k);

class TypeCheckResult {
 public:
  static TypeCheckResult success(PrType t) {
    TypeCheckResult r;
    r.type_ = std::move(t);
    return r;
  }
  static TypeCheckResult failure(TypeError e) {
    TypeCheckResult r;
    r.error_ = std::move(e);
    return r;
  }
  bool ok() const { return type_.has_value(); }
  const PrType& type() const { return *type_; }
  const TypeError& error() const { return *error_; }

 private:
  std::optional<PrType> type_;
  std::optional<TypeError> error_;
};

/// Syntax-directed type checker. Variables are looked up in Δ; parallel
/// and sequential composition fold compatibility+conjunction over children in
/// canonical order; loops additionally demand content requirements to be
/// provided by the membrane.
TypeCheckResult type_check(const Pattern& p, const Basis& basis, const TypeEnv& env);
TypeCheckResult type_check(const Term& t, const TypeEnv& env);

/// σ ∈ Σ_Δ: every binding's ground type equals the basis entry.
bool agrees(const Instantiation& sigma, const Basis& basis, const TypeEnv& env);

/// The minimal Δ with σ ∈ Σ_Δ: each binding mapped to its ground type.
/// TypeError if any binding is untypable.
struct BasisOfResult {
  std::optional<Basis> basis;
  std::optional<TypeError> error;
  bool ok() const { return basis.has_value(); }
};
BasisOfResult basis_of(const Instantiation& sigma, const TypeEnv& env);

}  // namespace cls
