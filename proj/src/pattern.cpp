#include "cls/pattern.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cls {

std::string Var::display() const {
  switch (kind) {
    case VarKind::Term: return "$" + name;
    case VarKind::Seq: return "~" + name;
    case VarKind::Elem: return "?" + name;
  }
  return name;
}

int compare(const Var& a, const Var& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
}

int compare(const PItem& a, const PItem& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  return 0;
}

namespace {

int compare_items(const std::vector<PItem>& a, const std::vector<PItem>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

}  // namespace

int compare(const PComponent& a, const PComponent& b) {
  if (a.kind != b.kind) return a.kind == PComponent::Kind::Seq ? -1 : 1;
  if (int c = compare_items(a.items, b.items); c != 0) return c;
  if (a.kind == PComponent::Kind::Seq) return 0;
  return compare(a.content, b.content);
}

int compare(const Pattern& a, const Pattern& b) {
  const auto& ca = a.components();
  const auto& cb = b.components();
  const std::size_t n = std::min(ca.size(), cb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  const auto& va = a.term_vars();
  const auto& vb = b.term_vars();
  if (va != vb) return va < vb ? -1 : 1;
  return 0;
}

Pattern make_pattern(std::vector<PComponent> comps, std::vector<std::string> tvars) {
  std::erase_if(comps, [](const PComponent& c) {
    return c.kind == PComponent::Kind::Seq && c.items.empty();
  });
  std::sort(comps.begin(), comps.end(),
            [](const PComponent& a, const PComponent& b) { return compare(a, b) < 0; });
  std::sort(tvars.begin(), tvars.end());
  Pattern p;
  p.comps_ = std::move(comps);
  p.tvars_ = std::move(tvars);
  return p;
}

namespace {

void collect_vars(const Pattern& p, std::set<Var>& out) {
  for (const auto& c : p.components()) {
    for (const auto& it : c.items) {
      if (it.kind == PItem::Kind::EVar) out.insert({VarKind::Elem, it.name});
      if (it.kind == PItem::Kind::SVar) out.insert({VarKind::Seq, it.name});
    }
    if (c.kind == PComponent::Kind::Loop) collect_vars(c.content, out);
  }
  for (const auto& x : p.term_vars()) out.insert({VarKind::Term, x});
}

}  // namespace

std::set<Var> pattern_vars(const Pattern& p) {
  std::set<Var> out;
  collect_vars(p, out);
  return out;
}

bool is_ground(const Pattern& p) { return pattern_vars(p).empty(); }

Term to_term(const Pattern& p) {
  std::vector<Component> comps;
  if (!p.term_vars().empty()) throw std::logic_error("to_term: pattern has variables");
  for (const auto& c : p.components()) {
    Sequence s;
    for (const auto& it : c.items) {
      if (it.kind != PItem::Kind::Elem) throw std::logic_error("to_term: pattern has variables");
      s.push_back(it.name);
    }
    if (c.kind == PComponent::Kind::Seq) {
      push_seq_component(comps, std::move(s));
    } else {
      push_loop_component(comps, std::move(s), to_term(c.content));
    }
  }
  return make_term(std::move(comps));
}

Pattern pattern_of(const Term& t) {
  std::vector<PComponent> comps;
  for (const auto& c : t.components()) {
    PComponent pc;
    pc.kind = c.kind == Component::Kind::Seq ? PComponent::Kind::Seq : PComponent::Kind::Loop;
    for (const auto& e : c.seq) pc.items.push_back({PItem::Kind::Elem, e});
    if (c.kind == Component::Kind::Loop) pc.content = pattern_of(c.content);
    comps.push_back(std::move(pc));
  }
  return make_pattern(std::move(comps), {});
}

namespace {

void print_pattern(std::ostream& os, const Pattern& p);

void print_items(std::ostream& os, const std::vector<PItem>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << '.';
    switch (items[i].kind) {
      case PItem::Kind::Elem: break;
      case PItem::Kind::EVar: os << '?'; break;
      case PItem::Kind::SVar: os << '~'; break;
    }
    os << items[i].name;
  }
}

void print_pcomponent(std::ostream& os, const PComponent& c) {
  if (c.kind == PComponent::Kind::Seq) {
    print_items(os, c.items);
    return;
  }
  os << "loop(";
  if (c.items.empty()) {
    os << "eps";
  } else {
    print_items(os, c.items);
  }
  os << "){";
  if (!c.content.empty()) print_pattern(os, c.content);
  os << '}';
}

void print_pattern(std::ostream& os, const Pattern& p) {
  bool first = true;
  for (const auto& c : p.components()) {
    if (!first) os << " | ";
    first = false;
    print_pcomponent(os, c);
  }
  for (const auto& x : p.term_vars()) {
    if (!first) os << " | ";
    first = false;
    os << '$' << x;
  }
}

}  // namespace

std::string pretty(const Pattern& p) {
  if (p.empty()) return "eps";
  std::ostringstream os;
  print_pattern(os, p);
  return os.str();
}

}  // namespace cls
