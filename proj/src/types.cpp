#include "cls/types.hpp"

#include <algorithm>
#include <sstream>

namespace cls {

void TypeEnv::add_type(const TypeName& t, TypeSet required, TypeSet excluded) {
  if (required_.count(t)) throw EnvError("duplicate basic type '" + t + "'");
  if (required.count(t) || excluded.count(t)) {
    throw EnvError("basic type '" + t + "' cannot require or exclude itself");
  }
  for (const auto& x : required) {
    if (excluded.count(x)) {
      throw EnvError("basic type '" + x + "' is both required and excluded by '" + t + "'");
    }
  }
  required_.emplace(t, std::move(required));
  excluded_.emplace(t, std::move(excluded));
}

void TypeEnv::add_element(const std::string& elem, const TypeName& t) {
  if (elem_types_.count(elem)) throw EnvError("duplicate element '" + elem + "'");
  if (!has_type(t)) throw EnvError("basic type '" + t + "' is not declared");
  elem_types_.emplace(elem, t);
}

void TypeEnv::check_references() const {
  for (const auto& [t, req] : required_) {
    for (const auto& x : req) {
      if (!has_type(x)) {
        throw EnvError("basic type '" + x + "' (required by '" + t + "') is not declared");
      }
    }
    for (const auto& x : excluded_.at(t)) {
      if (!has_type(x)) {
        throw EnvError("basic type '" + x + "' (excluded by '" + t + "') is not declared");
      }
    }
  }
}

std::optional<TypeName> TypeEnv::type_of(const std::string& elem) const {
  auto it = elem_types_.find(elem);
  if (it == elem_types_.end()) return std::nullopt;
  return it->second;
}

const TypeSet& TypeEnv::required_of(const TypeName& t) const {
  auto it = required_.find(t);
  if (it == required_.end()) throw UnknownBasicTypeError("unknown basic type '" + t + "'");
  return it->second;
}

const TypeSet& TypeEnv::excluded_of_type(const TypeName& t) const {
  auto it = excluded_.find(t);
  if (it == excluded_.end()) throw UnknownBasicTypeError("unknown basic type '" + t + "'");
  return it->second;
}

TypeSet excluded_of(const TypeSet& present, const TypeEnv& env) {
  TypeSet out;
  for (const auto& t : present) {
    const TypeSet& e = env.excluded_of_type(t);
    out.insert(e.begin(), e.end());
  }
  return out;
}

namespace {

bool disjoint(const TypeSet& a, const TypeSet& b) {
  for (const auto& x : a) {
    if (b.count(x)) return false;
  }
  return true;
}

TypeSet set_union(const TypeSet& a, const TypeSet& b) {
  TypeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

TypeSet set_diff(const TypeSet& a, const TypeSet& b) {
  TypeSet out;
  for (const auto& x : a) {
    if (!b.count(x)) out.insert(x);
  }
  return out;
}

}  // namespace

bool well_formed(const PrType& t, const TypeEnv& env) {
  TypeSet excl = excluded_of(t.present, env);
  return disjoint(t.present, excl) && disjoint(t.present, t.required) &&
         disjoint(t.required, excl);
}

bool compatible(const PrType& a, const PrType& b, const TypeEnv& env) {
  if (!well_formed(a, env) || !well_formed(b, env)) return false;
  TypeSet ea = excluded_of(a.present, env);
  TypeSet eb = excluded_of(b.present, env);
  return disjoint(ea, b.present) && disjoint(ea, b.required) && disjoint(eb, a.present) &&
         disjoint(eb, a.required);
}

PrType conjunction(const PrType& a, const PrType& b, const TypeEnv& env) {
  if (!compatible(a, b, env)) {
    throw NotCompatibleError("conjunction of incompatible types " + format_pr_type(a) + " and " +
                             format_pr_type(b));
  }
  PrType out;
  out.present = set_union(a.present, b.present);
  out.required = set_diff(set_union(a.required, b.required), out.present);
  return out;
}

std::string format_type_set(const TypeSet& s) {
  std::ostringstream os;
  os << '{';
  for (auto it = s.begin(); it != s.end(); ++it) {
    if (it != s.begin()) os << ", ";
    os << *it;
  }
  os << '}';
  return os.str();
}

std::string format_pr_type(const PrType& t) {
  return "(" + format_type_set(t.present) + ", " + format_type_set(t.required) + ")";
}

void Basis::insert(const Var& v, const PrType& t, const TypeEnv& env) {
  if (!well_formed(t, env)) {
    throw InvalidBasisError("basis entry for " + v.display() +
                            " is not well formed: " + format_pr_type(t));
  }
  if (v.kind == VarKind::Elem) {
    if (t.present.size() != 1 || t.required != env.required_of(*t.present.begin())) {
      throw InvalidBasisError("basis entry for " + v.display() +
                              " must have shape ({t}, R_t), got " + format_pr_type(t));
    }
  }
  if (!entries_.emplace(v, t).second) {
    throw InvalidBasisError("duplicate basis entry for " + v.display());
  }
}

const PrType* Basis::find(const Var& v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string type_error_kind_name(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::UnknownElement: return "UnknownElement";
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::Incompatible: return "Incompatible";
    case TypeErrorKind::RequirementNotProvided: return "RequirementNotProvided";
  }
  return "?";
}

std::string format_type_error(const TypeError& e) {
  std::string at = e.where.empty() ? "top level" : e.where;
  return type_error_kind_name(e.kind) + " at " + at + ": " + e.detail;
}

namespace {

/// Syntax-directed over the term. Children are folded in canonical order
/// starting from the first child; the fold order cannot change the outcome
/// (tested).
struct Checker {
  const Basis& basis;
  const TypeEnv& env;

  TypeCheckResult check_pattern(const Pattern& p, const std::string& path) {
    std::optional<PrType> acc;
    std::size_t child = 0;
    for (const auto& c : p.components()) {
      std::string cpath = path + "[" + std::to_string(child++) + "]";
      auto r = check_component(c, cpath);
      if (!r.ok()) return r;
      if (auto err = combine(acc, r.type(), cpath)) return TypeCheckResult::failure(*err);
    }
    for (const auto& x : p.term_vars()) {
      std::string cpath = path + "[" + std::to_string(child++) + "]";
      auto r = check_var({VarKind::Term, x}, cpath);
      if (!r.ok()) return r;
      if (auto err = combine(acc, r.type(), cpath)) return TypeCheckResult::failure(*err);
    }
    return TypeCheckResult::success(acc.value_or(PrType{}));
  }

  std::optional<TypeError> combine(std::optional<PrType>& acc, const PrType& next,
                                   const std::string& cpath) {
    if (!acc) {
      acc = next;
      return std::nullopt;
    }
    if (!compatible(*acc, next, env)) {
      return TypeError{TypeErrorKind::Incompatible, cpath,
                       format_pr_type(*acc) + " is not compatible with " + format_pr_type(next)};
    }
    acc = conjunction(*acc, next, env);
    return std::nullopt;
  }

  TypeCheckResult check_component(const PComponent& c, const std::string& path) {
    if (c.kind == PComponent::Kind::Seq) return check_items(c.items, path);
    auto mem = check_items(c.items, path + ".mem");
    if (!mem.ok()) return mem;
    auto con = check_pattern(c.content, path + ".content");
    if (!con.ok()) return con;
    if (!compatible(mem.type(), con.type(), env)) {
      return TypeCheckResult::failure(
          {TypeErrorKind::Incompatible, path,
           "membrane type " + format_pr_type(mem.type()) + " is not compatible with content type " +
               format_pr_type(con.type())});
    }
    if (!std::includes(mem.type().present.begin(), mem.type().present.end(),
                       con.type().required.begin(), con.type().required.end())) {
      return TypeCheckResult::failure(
          {TypeErrorKind::RequirementNotProvided, path,
           "content requires " + format_type_set(con.type().required) +
               " but the membrane provides " + format_type_set(mem.type().present)});
    }
    PrType out;
    out.present = mem.type().present;
    out.required = set_diff(mem.type().required, con.type().present);
    return TypeCheckResult::success(out);
  }

  TypeCheckResult check_items(const std::vector<PItem>& items, const std::string& path) {
    std::optional<PrType> acc;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::string ipath = path + "[" + std::to_string(i) + "]";
      TypeCheckResult r = TypeCheckResult::success(PrType{});
      switch (items[i].kind) {
        case PItem::Kind::Elem: r = check_elem(items[i].name, ipath); break;
        case PItem::Kind::EVar: r = check_var({VarKind::Elem, items[i].name}, ipath); break;
        case PItem::Kind::SVar: r = check_var({VarKind::Seq, items[i].name}, ipath); break;
      }
      if (!r.ok()) return r;
      if (auto err = combine(acc, r.type(), ipath)) return TypeCheckResult::failure(*err);
    }
    return TypeCheckResult::success(acc.value_or(PrType{}));
  }

  TypeCheckResult check_elem(const std::string& name, const std::string& path) {
    auto t = env.type_of(name);
    if (!t) {
      return TypeCheckResult::failure(
          {TypeErrorKind::UnknownElement, path, "element '" + name + "' is not declared"});
    }
    return TypeCheckResult::success(PrType{{*t}, env.required_of(*t)});
  }

  TypeCheckResult check_var(const Var& v, const std::string& path) {
    const PrType* t = basis.find(v);
    if (!t) {
      return TypeCheckResult::failure({TypeErrorKind::UnboundVariable, path,
                                       "variable " + v.display() + " is not in the basis"});
    }
    return TypeCheckResult::success(*t);
  }
};

}  // namespace

TypeCheckResult type_check(const Pattern& p, const Basis& basis, const TypeEnv& env) {
  Checker c{basis, env};
  return c.check_pattern(p, "");
}

TypeCheckResult type_check(const Term& t, const TypeEnv& env) {
  Basis empty;
  return type_check(pattern_of(t), empty, env);
}

namespace {

TypeCheckResult ground_seq_type(const Sequence& s, const TypeEnv& env) {
  Basis empty;
  Checker c{empty, env};
  std::vector<PItem> items;
  for (const auto& e : s) items.push_back({PItem::Kind::Elem, e});
  return c.check_items(items, "");
}

TypeCheckResult binding_type(const Var& v, const Instantiation& sigma, const TypeEnv& env) {
  switch (v.kind) {
    case VarKind::Elem: {
      Basis empty;
      Checker c{empty, env};
      return c.check_elem(sigma.elems.at(v.name), "");
    }
    case VarKind::Seq: return ground_seq_type(sigma.seqs.at(v.name), env);
    case VarKind::Term: return type_check(sigma.terms.at(v.name), env);
  }
  return TypeCheckResult::success(PrType{});
}

}  // namespace

bool agrees(const Instantiation& sigma, const Basis& basis, const TypeEnv& env) {
  for (const auto& [v, tau] : basis.entries()) {
    bool have = (v.kind == VarKind::Elem && sigma.elems.count(v.name)) ||
                (v.kind == VarKind::Seq && sigma.seqs.count(v.name)) ||
                (v.kind == VarKind::Term && sigma.terms.count(v.name));
    if (!have) return false;
    auto r = binding_type(v, sigma, env);
    if (!r.ok() || !(r.type() == tau)) return false;
  }
  return true;
}

BasisOfResult basis_of(const Instantiation& sigma, const TypeEnv& env) {
  Basis b;
  auto add = [&](const Var& v) -> std::optional<TypeError> {
    auto r = binding_type(v, sigma, env);
    if (!r.ok()) {
      TypeError e = r.error();
      e.detail = "binding of " + v.display() + ": " + e.detail;
      return e;
    }
    b.insert(v, r.type(), env);
    return std::nullopt;
  };
  for (const auto& [name, val] : sigma.elems) {
    (void)val;
    if (auto e = add({VarKind::Elem, name})) return {std::nullopt, e};
  }
  for (const auto& [name, val] : sigma.seqs) {
    (void)val;
    if (auto e = add({VarKind::Seq, name})) return {std::nullopt, e};
  }
  for (const auto& [name, val] : sigma.terms) {
    (void)val;
    if (auto e = add({VarKind::Term, name})) return {std::nullopt, e};
  }
  return {std::move(b), std::nullopt};
}

}  // namespace cls
