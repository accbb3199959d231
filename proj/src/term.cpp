#include "cls/term.hpp"

#include <algorithm>
#include <sstream>

namespace cls {

int compare(const Sequence& a, const Sequence& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = a[i].compare(b[i]); c != 0) return c < 0 ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

int compare(const Component& a, const Component& b) {
  if (a.kind != b.kind) return a.kind == Component::Kind::Seq ? -1 : 1;
  if (int c = compare(a.seq, b.seq); c != 0) return c;
  if (a.kind == Component::Kind::Seq) return 0;
  return compare(a.content, b.content);
}

int compare(const Term& a, const Term& b) {
  const auto& ca = a.components();
  const auto& cb = b.components();
  const std::size_t n = std::min(ca.size(), cb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  return 0;
}

std::size_t Term::size() const {
  std::size_t n = 0;
  for (const auto& c : comps_) {
    n += c.seq.size();
    if (c.kind == Component::Kind::Loop) n += 1 + c.content.size();
  }
  return n;
}

Term make_term(std::vector<Component> comps) {
  std::sort(comps.begin(), comps.end(),
            [](const Component& a, const Component& b) { return compare(a, b) < 0; });
  Term t;
  t.comps_ = std::move(comps);
  return t;
}

Term par(const Term& a, const Term& b) {
  std::vector<Component> comps = a.components();
  comps.insert(comps.end(), b.components().begin(), b.components().end());
  return make_term(std::move(comps));
}

bool push_seq_component(std::vector<Component>& out, Sequence s) {
  if (s.empty()) return false;
  Component c;
  c.kind = Component::Kind::Seq;
  c.seq = std::move(s);
  out.push_back(std::move(c));
  return true;
}

bool push_loop_component(std::vector<Component>& out, Sequence membrane, Term content) {
  if (membrane.empty() && content.empty()) return false;
  Component c;
  c.kind = Component::Kind::Loop;
  c.seq = least_rotation(std::move(membrane));
  c.content = std::move(content);
  out.push_back(std::move(c));
  return true;
}

Sequence least_rotation(Sequence s) {
  if (s.size() < 2) return s;
  Sequence best = s;
  Sequence cur = std::move(s);
  for (std::size_t k = 1; k < cur.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (compare(cur, best) < 0) best = cur;
  }
  return best;
}

Term normalize(const RawTerm& raw) {
  std::vector<Component> comps;
  for (const auto& item : raw.items) {
    if (item.kind == RawItem::Kind::Seq) {
      push_seq_component(comps, item.seq);
    } else {
      push_loop_component(comps, item.seq, normalize(item.content));
    }
  }
  return make_term(std::move(comps));
}

bool congruent(const Term& a, const Term& b) { return a == b; }

bool congruent(const RawTerm& a, const RawTerm& b) { return normalize(a) == normalize(b); }

namespace {

void print_term(std::ostream& os, const Term& t);

void print_component(std::ostream& os, const Component& c) {
  if (c.kind == Component::Kind::Seq) {
    for (std::size_t i = 0; i < c.seq.size(); ++i) {
      if (i) os << '.';
      os << c.seq[i];
    }
    return;
  }
  os << "loop(";
  if (c.seq.empty()) {
    os << "eps";
  } else {
    for (std::size_t i = 0; i < c.seq.size(); ++i) {
      if (i) os << '.';
      os << c.seq[i];
    }
  }
  os << "){";
  if (!c.content.empty()) print_term(os, c.content);
  os << '}';
}

void print_term(std::ostream& os, const Term& t) {
  const auto& comps = t.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (i) os << " | ";
    print_component(os, comps[i]);
  }
}

}  // namespace

std::string pretty(const Term& t) {
  if (t.empty()) return "eps";
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

}  // namespace cls
