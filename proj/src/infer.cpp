#include "cls/infer.hpp"

#include <algorithm>
#include <sstream>

namespace cls {

ExprPtr TypeExpr::consts(TypeSet s) {
  TypeExpr e;
  e.kind_ = Kind::Consts;
  e.consts_ = std::move(s);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::evar(Var owner) {
  TypeExpr e;
  e.kind_ = Kind::EVar;
  e.owner_ = std::move(owner);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::pvar(Var owner) {
  TypeExpr e;
  e.kind_ = Kind::PVar;
  e.owner_ = std::move(owner);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::rvar(Var owner) {
  TypeExpr e;
  e.kind_ = Kind::RVar;
  e.owner_ = std::move(owner);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::req_of(Var owner) {
  TypeExpr e;
  e.kind_ = Kind::ReqOf;
  e.owner_ = std::move(owner);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::unite(ExprPtr a, ExprPtr b) {
  TypeExpr e;
  e.kind_ = Kind::Union;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return std::make_shared<const TypeExpr>(std::move(e));
}

ExprPtr TypeExpr::diff(ExprPtr a, ExprPtr b) {
  TypeExpr e;
  e.kind_ = Kind::Diff;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return std::make_shared<const TypeExpr>(std::move(e));
}

std::string print_expr(const ExprPtr& e) {
  switch (e->kind()) {
    case TypeExpr::Kind::Consts: return format_type_set(e->constants());
    case TypeExpr::Kind::EVar: return "phi(" + e->owner().display() + ")";
    case TypeExpr::Kind::PVar: return "phi(" + e->owner().display() + ")";
    case TypeExpr::Kind::RVar: return "psi(" + e->owner().display() + ")";
    case TypeExpr::Kind::ReqOf: return "Req(phi(" + e->owner().display() + "))";
    case TypeExpr::Kind::Union: return "(" + print_expr(e->lhs()) + " + " + print_expr(e->rhs()) + ")";
    case TypeExpr::Kind::Diff: return "(" + print_expr(e->lhs()) + " - " + print_expr(e->rhs()) + ")";
  }
  return "?";
}

bool mentions(const ExprPtr& e, const Var& v) {
  switch (e->kind()) {
    case TypeExpr::Kind::Consts: return false;
    case TypeExpr::Kind::EVar:
    case TypeExpr::Kind::PVar:
    case TypeExpr::Kind::RVar:
    case TypeExpr::Kind::ReqOf: return e->owner() == v;
    case TypeExpr::Kind::Union:
    case TypeExpr::Kind::Diff: return mentions(e->lhs(), v) || mentions(e->rhs(), v);
  }
  return false;
}

Constraint Constraint::eq(ExprPtr l, ExprPtr r) {
  Constraint c;
  c.kind = Kind::Eq;
  c.lhs = std::move(l);
  c.rhs = std::move(r);
  return c;
}

Constraint Constraint::subset(ExprPtr l, ExprPtr r) {
  Constraint c;
  c.kind = Kind::Subset;
  c.lhs = std::move(l);
  c.rhs = std::move(r);
  return c;
}

Constraint Constraint::ok(ExprPair a, ExprPair b) {
  Constraint c;
  c.kind = Kind::Ok;
  c.a = std::move(a);
  c.b = std::move(b);
  return c;
}

std::string print_constraint(const Constraint& c) {
  switch (c.kind) {
    case Constraint::Kind::Eq: return print_expr(c.lhs) + " = " + print_expr(c.rhs);
    case Constraint::Kind::Subset: return print_expr(c.lhs) + " <= " + print_expr(c.rhs);
    case Constraint::Kind::Ok:
      return "ok((" + print_expr(c.a.present) + ", " + print_expr(c.a.required) + "), (" +
             print_expr(c.b.present) + ", " + print_expr(c.b.required) + "))";
  }
  return "?";
}

namespace {

struct UnknownElem {
  TypeError error;
};

/// Syntax-directed over the pattern; same child order as the checker.
struct Inferrer {
  const TypeEnv& env;
  std::map<Var, ExprPair> basis;
  std::vector<Constraint> constraints;
  std::set<std::string> seen;

  void add(Constraint c) {
    if (seen.insert(print_constraint(c)).second) constraints.push_back(std::move(c));
  }

  ExprPair var_pair(const Var& v) {
    auto it = basis.find(v);
    if (it != basis.end()) return it->second;
    ExprPair pr;
    if (v.kind == VarKind::Elem) {
      pr = {TypeExpr::evar(v), TypeExpr::rvar(v)};
      add(Constraint::eq(TypeExpr::rvar(v), TypeExpr::req_of(v)));
    } else {
      pr = {TypeExpr::pvar(v), TypeExpr::rvar(v)};
    }
    basis.emplace(v, pr);
    return pr;
  }

  void fold(std::optional<ExprPair>& acc, ExprPair next) {
    if (!acc) {
      acc = std::move(next);
      return;
    }
    add(Constraint::ok(*acc, next));
    ExprPtr present = TypeExpr::unite(acc->present, next.present);
    ExprPtr required =
        TypeExpr::diff(TypeExpr::unite(acc->required, next.required), present);
    acc = ExprPair{std::move(present), std::move(required)};
  }

  ExprPair infer_pattern(const Pattern& p, const std::string& path) {
    std::optional<ExprPair> acc;
    std::size_t child = 0;
    for (const auto& c : p.components()) {
      std::string cpath = path + "[" + std::to_string(child++) + "]";
      fold(acc, infer_component(c, cpath));
    }
    for (const auto& x : p.term_vars()) {
      ++child;
      fold(acc, var_pair({VarKind::Term, x}));
    }
    if (!acc) return {TypeExpr::consts({}), TypeExpr::consts({})};
    return *acc;
  }

  ExprPair infer_component(const PComponent& c, const std::string& path) {
    if (c.kind == PComponent::Kind::Seq) return infer_items(c.items, path);
    ExprPair mem = infer_items(c.items, path + ".mem");
    ExprPair con = infer_pattern(c.content, path + ".content");
    add(Constraint::ok(mem, con));
    add(Constraint::subset(con.required, mem.present));
    return {mem.present, TypeExpr::diff(mem.required, con.present)};
  }

  ExprPair infer_items(const std::vector<PItem>& items, const std::string& path) {
    std::optional<ExprPair> acc;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::string ipath = path + "[" + std::to_string(i) + "]";
      switch (items[i].kind) {
        case PItem::Kind::Elem: {
          auto t = env.type_of(items[i].name);
          if (!t) {
            throw UnknownElem{{TypeErrorKind::UnknownElement, ipath,
                               "element '" + items[i].name + "' is not declared"}};
          }
          fold(acc, {TypeExpr::consts({*t}), TypeExpr::consts(env.required_of(*t))});
          break;
        }
        case PItem::Kind::EVar: fold(acc, var_pair({VarKind::Elem, items[i].name})); break;
        case PItem::Kind::SVar: fold(acc, var_pair({VarKind::Seq, items[i].name})); break;
      }
    }
    if (!acc) return {TypeExpr::consts({}), TypeExpr::consts({})};
    return *acc;
  }
};

}  // namespace

InferResult infer(const Pattern& p, const TypeEnv& env) {
  Inferrer inf{env, {}, {}, {}};
  try {
    ExprPair type = inf.infer_pattern(p, "");
    PrincipalTyping pt;
    pt.basis = std::move(inf.basis);
    pt.type = std::move(type);
    pt.constraints = std::move(inf.constraints);
    return {std::move(pt), std::nullopt};
  } catch (const UnknownElem& u) {
    return {std::nullopt, u.error};
  }
}

const TypeName& TypeMapping::elem(const Var& v) const {
  auto it = elem_.find(v);
  if (it == elem_.end()) {
    throw UnboundTypeVariableError("unbound type variable phi(" + v.display() + ")");
  }
  return it->second;
}

const TypeSet& TypeMapping::present(const Var& v) const {
  auto it = present_.find(v);
  if (it == present_.end()) {
    throw UnboundTypeVariableError("unbound type variable phi(" + v.display() + ")");
  }
  return it->second;
}

const TypeSet& TypeMapping::required(const Var& v) const {
  auto it = required_.find(v);
  if (it == required_.end()) {
    throw UnboundTypeVariableError("unbound type variable psi(" + v.display() + ")");
  }
  return it->second;
}

TypeSet eval_expr(const ExprPtr& e, const TypeMapping& m, const TypeEnv& env) {
  switch (e->kind()) {
    case TypeExpr::Kind::Consts: return e->constants();
    case TypeExpr::Kind::EVar: return {m.elem(e->owner())};
    case TypeExpr::Kind::PVar: return m.present(e->owner());
    case TypeExpr::Kind::RVar: return m.required(e->owner());
    case TypeExpr::Kind::ReqOf: return env.required_of(m.elem(e->owner()));
    case TypeExpr::Kind::Union: {
      TypeSet out = eval_expr(e->lhs(), m, env);
      TypeSet r = eval_expr(e->rhs(), m, env);
      out.insert(r.begin(), r.end());
      return out;
    }
    case TypeExpr::Kind::Diff: {
      TypeSet l = eval_expr(e->lhs(), m, env);
      TypeSet r = eval_expr(e->rhs(), m, env);
      TypeSet out;
      for (const auto& x : l) {
        if (!r.count(x)) out.insert(x);
      }
      return out;
    }
  }
  return {};
}

bool satisfies(const TypeMapping& m, const std::vector<Constraint>& cs, const TypeEnv& env) {
  for (const auto& c : cs) {
    switch (c.kind) {
      case Constraint::Kind::Eq:
        if (!(eval_expr(c.lhs, m, env) == eval_expr(c.rhs, m, env))) return false;
        break;
      case Constraint::Kind::Subset: {
        TypeSet l = eval_expr(c.lhs, m, env);
        TypeSet r = eval_expr(c.rhs, m, env);
        if (!std::includes(r.begin(), r.end(), l.begin(), l.end())) return false;
        break;
      }
      case Constraint::Kind::Ok: {
        PrType a{eval_expr(c.a.present, m, env), eval_expr(c.a.required, m, env)};
        PrType b{eval_expr(c.b.present, m, env), eval_expr(c.b.required, m, env)};
        if (!compatible(a, b, env)) return false;
        break;
      }
    }
  }
  return true;
}

TypeMapping mapping_from_basis(const Basis& basis, const TypeEnv& env) {
  (void)env;
  TypeMapping m;
  for (const auto& [v, t] : basis.entries()) {
    if (v.kind == VarKind::Elem) {
      m.set_elem(v, *t.present.begin());
      m.set_required(v, t.required);
    } else {
      m.set_present(v, t.present);
      m.set_required(v, t.required);
    }
  }
  return m;
}

std::optional<TypeMapping> mapping_from_instantiation(const Instantiation& sigma,
                                                      const TypeEnv& env) {
  auto b = basis_of(sigma, env);
  if (!b.ok()) return std::nullopt;
  return mapping_from_basis(*b.basis, env);
}

bool ok_for_context_direct(const PrType& tau, const Context& c, const TypeEnv& env) {
  if (!well_formed(tau, env)) return false;
  Basis b;
  b.insert(kHoleVar, tau, env);
  auto r = type_check(context_pattern(c, kHoleVarName), b, env);
  return r.ok() && r.type().required.empty();
}

bool ok_for_context_core(const PrType& tau, const Context& c, const TypeEnv& env) {
  if (!well_formed(tau, env)) return false;
  auto inf = infer(context_pattern(core(c), kHoleVarName), env);
  if (!inf.ok()) return false;
  TypeMapping m;
  m.set_present(kHoleVar, tau.present);
  m.set_required(kHoleVar, tau.required);
  std::vector<Constraint> cs = inf.principal->constraints;
  if (mentions(inf.principal->type.required, kHoleVar)) {
    cs.push_back(Constraint::eq(inf.principal->type.required, TypeExpr::consts({})));
  }
  try {
    return satisfies(m, cs, env);
  } catch (const UnboundTypeVariableError&) {
    return false;
  }
}

ClassifyResult classify_rule(const Rule& r, const Basis& basis, const TypeEnv& env) {
  auto res = type_check(r.rhs, basis, env);
  if (res.ok()) return {res.type(), std::nullopt};
  return {std::nullopt, res.error()};
}

bool applicable(const Rule& r, const Instantiation& sigma, const Context& c, const TypeEnv& env) {
  auto m_opt = mapping_from_instantiation(sigma, env);
  if (!m_opt) return false;
  TypeMapping m = std::move(*m_opt);

  auto inf_rhs = infer(r.rhs, env);
  if (!inf_rhs.ok()) return false;
  auto inf_core = infer(context_pattern(core(c), kHoleVarName), env);
  if (!inf_core.ok()) return false;

  try {
    m.set_present(kHoleVar, eval_expr(inf_rhs.principal->type.present, m, env));
    m.set_required(kHoleVar, eval_expr(inf_rhs.principal->type.required, m, env));

    std::vector<Constraint> cs = inf_rhs.principal->constraints;
    cs.push_back(Constraint::eq(inf_rhs.principal->type.present, TypeExpr::pvar(kHoleVar)));
    cs.push_back(Constraint::eq(inf_rhs.principal->type.required, TypeExpr::rvar(kHoleVar)));
    for (const auto& k : inf_core.principal->constraints) cs.push_back(k);
    if (mentions(inf_core.principal->type.required, kHoleVar)) {
      cs.push_back(Constraint::eq(inf_core.principal->type.required, TypeExpr::consts({})));
    }
    return satisfies(m, cs, env);
  } catch (const UnboundTypeVariableError&) {
    return false;
  }
}

TypedStepReport typed_step_report(const std::vector<Rule>& rules, const Term& t,
                                  const TypeEnv& env, const MatchOptions& opts) {
  auto tc = type_check(t, env);
  if (!tc.ok()) {
    throw IllTypedStateError("state is not a correct system: " + format_type_error(tc.error()));
  }
  if (!tc.type().required.empty()) {
    throw IllTypedStateError("state is not a correct system: unmet requirements " +
                             format_type_set(tc.type().required));
  }

  TypedStepReport rep;
  std::set<Successor> out;
  for (const auto& r : rules) {
    for (const auto& rx : find_redexes(r.lhs, t, opts)) {
      StepAttempt at;
      at.rule = r.name;
      at.context = rx.context;
      at.sigma = rx.sigma;

      auto b = basis_of(rx.sigma, env);
      if (!b.ok()) {
        at.outcome = StepAttempt::Outcome::BindingUntypable;
        at.error = b.error;
        rep.attempts.push_back(std::move(at));
        continue;
      }
      auto cl = classify_rule(r, *b.basis, env);
      if (!cl.ok()) {
        at.outcome = StepAttempt::Outcome::RhsNotTypable;
        at.error = cl.error;
        rep.attempts.push_back(std::move(at));
        continue;
      }
      if (!ok_for_context_direct(*cl.type, rx.context, env)) {
        at.outcome = StepAttempt::Outcome::ContextRejected;
        Basis hb;
        hb.insert(kHoleVar, *cl.type, env);
        auto cr = type_check(context_pattern(rx.context, kHoleVarName), hb, env);
        if (!cr.ok()) {
          at.error = cr.error();
        } else {
          at.error = TypeError{TypeErrorKind::RequirementNotProvided, "",
                               "plugging leaves requirements " +
                                   format_type_set(cr.type().required) + " unmet at top level"};
        }
        rep.attempts.push_back(std::move(at));
        continue;
      }
      at.outcome = StepAttempt::Outcome::Applied;
      Term succ = plug(rx.context, instantiate(r.rhs, rx.sigma));
      at.successor = succ;
      out.insert({r.name, succ});
      rep.attempts.push_back(std::move(at));
    }
  }
  rep.successors.assign(out.begin(), out.end());
  return rep;
}

std::vector<Successor> typed_step(const std::vector<Rule>& rules, const Term& t,
                                  const TypeEnv& env, const MatchOptions& opts) {
  return typed_step_report(rules, t, env, opts).successors;
}

}  // namespace cls
