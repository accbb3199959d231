#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cls/match.hpp"
#include "cls/pattern.hpp"
#include "cls/rewrite.hpp"
#include "cls/term.hpp"
#include "cls/types.hpp"

namespace cls {

/// Formal set expression over basic-type constants and per-variable type
/// variables: phi(?x) an e-var (singleton under a mapping), phi(v)/psi(v) the
/// p-var/r-var of a sequence or term variable, Req(phi(?x)) the required set
/// of the basic type an e-var maps to.
class TypeExpr;
using ExprPtr = std::shared_ptr<const TypeExpr>;

class TypeExpr {
 public:
  enum class Kind { Consts, EVar, PVar, RVar, ReqOf, Union, Diff };

  static ExprPtr consts(TypeSet s);
  static ExprPtr evar(Var owner);
  static ExprPtr pvar(Var owner);
  static ExprPtr rvar(Var owner);
  static ExprPtr req_of(Var owner);  // owner must be an element variable
  static ExprPtr unite(ExprPtr a, ExprPtr b);
  static ExprPtr diff(ExprPtr a, ExprPtr b);

  Kind kind() const { return kind_; }
  const TypeSet& constants() const { return consts_; }
  const Var& owner() const { return owner_; }
  const ExprPtr& lhs() const { return lhs_; }
  const ExprPtr& rhs() const { return rhs_; }

 private:
  Kind kind_ = Kind::Consts;
  TypeSet consts_;
  Var owner_;
  ExprPtr lhs_, rhs_;
};

std::string print_expr(const ExprPtr& e);

/// True iff any type variable owned by v occurs in e.
bool mentions(const ExprPtr& e, const Var& v);

struct ExprPair {
  ExprPtr present;
  ExprPtr required;
};

struct Constraint {
  enum class Kind { Eq, Ok, Subset };
  Kind kind = Kind::Eq;
  ExprPtr lhs, rhs;  // Eq: lhs = rhs; Subset: lhs ⊆ rhs
  ExprPair a, b;     // Ok(a, b)

  static Constraint eq(ExprPtr l, ExprPtr r);
  static Constraint ok(ExprPair a, ExprPair b);
  static Constraint subset(ExprPtr l, ExprPtr r);
};

std::string print_constraint(const Constraint& c);

/// Principal typing: basis scheme Θ, type expression pair (Φ, Ψ) and
/// constraint set Ξ (deduplicated, in generation order).
struct PrincipalTyping {
  std::map<Var, ExprPair> basis;
  ExprPair type;
  std::vector<Constraint> constraints;
};

struct InferResult {
  std::optional<PrincipalTyping> principal;
  std::optional<TypeError> error;  // UnknownElement only
  bool ok() const { return principal.has_value(); }
};

InferResult infer(const Pattern& p, const TypeEnv& env);

struct UnboundTypeVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Kind-respecting valuation: e-vars to basic types, p-/r-vars to sets.
class TypeMapping {
 public:
  void set_elem(const Var& v, TypeName t) { elem_[v] = std::move(t); }
  void set_present(const Var& v, TypeSet s) { present_[v] = std::move(s); }
  void set_required(const Var& v, TypeSet s) { required_[v] = std::move(s); }

  const TypeName& elem(const Var& v) const;      // throws UnboundTypeVariableError
  const TypeSet& present(const Var& v) const;    // throws UnboundTypeVariableError
  const TypeSet& required(const Var& v) const;   // throws UnboundTypeVariableError

  const std::map<Var, TypeName>& elems() const { return elem_; }
  const std::map<Var, TypeSet>& presents() const { return present_; }
  const std::map<Var, TypeSet>& requireds() const { return required_; }

 private:
  std::map<Var, TypeName> elem_;
  std::map<Var, TypeSet> present_, required_;
};

TypeSet eval_expr(const ExprPtr& e, const TypeMapping& m, const TypeEnv& env);

/// Eq as set equality, Subset as inclusion, Ok as well-formedness of both
/// evaluated pairs plus compatibility.
bool satisfies(const TypeMapping& m, const std::vector<Constraint>& cs, const TypeEnv& env);

/// The mapping induced by a ground basis: element entries ({t},R_t) become
/// m(phi)=t, m(psi)=R_t; other entries (P,R) become m(phi)=P, m(psi)=R.
TypeMapping mapping_from_basis(const Basis& basis, const TypeEnv& env);

/// The mapping induced by an instantiation, typing each binding under Γ;
/// nullopt if a binding is untypable.
std::optional<TypeMapping> mapping_from_instantiation(const Instantiation& sigma,
                                                      const TypeEnv& env);

/// Internal term variable standing for the hole when a context is typed as a
/// pattern. '%' is outside the identifier alphabet, so it cannot collide with
/// parsed rule variables.
inline const std::string kHoleVarName = "%hole";
inline const Var kHoleVar{VarKind::Term, kHoleVarName};

/// Direct path: type C[X] under X:τ with the checker and demand an empty
/// requirement component.
bool ok_for_context_direct(const PrType& tau, const Context& c, const TypeEnv& env);

/// Constraint path over the context core: infer core(c)[X], map the hole
/// variables to τ, and check Ξ plus — only when a hole variable occurs in the
/// inferred result requirement — that the result requirement is empty. Agrees
/// with the direct path whenever some term plugs into c to form a correct
/// system.
bool ok_for_context_core(const PrType& tau, const Context& c, const TypeEnv& env);

/// Δ-(P,R)-reduction rule check: the type of rhs under Δ, or the TypeError
/// explaining why the rule is not a reduction rule for this Δ.
struct ClassifyResult {
  std::optional<PrType> type;
  std::optional<TypeError> error;
  bool ok() const { return type.has_value(); }
};
ClassifyResult classify_rule(const Rule& r, const Basis& basis, const TypeEnv& env);

/// One-shot applicability check on the constraint path: with (Φ,Ψ,Ξ) = infer(rhs) and
/// (Φ′,Ψ′,Ξ′) = infer(core(c)[X]), build m from σ, extend it with
/// m(phi_X)=m(Φ), m(psi_X)=m(Ψ), and check Ξ ∪ Ξ′ ∪ {Φ=phi_X, Ψ=psi_X} plus
/// the conditional Ψ′=∅. False (not an error) when σ has an untypable
/// binding or rhs/core mention undeclared elements.
bool applicable(const Rule& r, const Instantiation& sigma, const Context& c, const TypeEnv& env);

struct IllTypedStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One typed-semantics step: every redex of every rule that passes the direct
/// path (basis_of + classify_rule + ok_for_context_direct). Successors are
/// deduplicated modulo congruence per rule. Throws IllTypedStateError unless
/// type_check(t) succeeds with an empty requirement set.
std::vector<Successor> typed_step(const std::vector<Rule>& rules, const Term& t,
                                  const TypeEnv& env, const MatchOptions& opts = {});

/// typed_step with per-redex outcomes, for diagnostics and tests.
struct StepAttempt {
  enum class Outcome { Applied, BindingUntypable, RhsNotTypable, ContextRejected };
  std::string rule;
  Context context;
  Instantiation sigma;
  Outcome outcome = Outcome::Applied;
  std::optional<TypeError> error;   // for the rejected outcomes
  std::optional<Term> successor;    // for Applied
};
struct TypedStepReport {
  std::vector<StepAttempt> attempts;
  std::vector<Successor> successors;
};
TypedStepReport typed_step_report(const std::vector<Rule>& rules, const Term& t,
                                  const TypeEnv& env, const MatchOptions& opts = {});

}  // namespace cls
