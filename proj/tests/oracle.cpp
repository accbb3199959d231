#include "oracle.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace oracle {

namespace {

int rnd(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(rnd(rng, 0, static_cast<int>(xs.size()) - 1))];
}

const char* kGammaExSrc =
    "type tA excludes {tB};\n"
    "type tB excludes {tA};\n"
    "type tM;\n"
    "elem a : tA;\n"
    "elem b : tB;\n"
    "elem m : tM;\n";

const char* kGammaAbsSrc =
    "type tC;\n"
    "type tR;\n"
    "type tC2 requires {tR};\n"
    "type tM;\n"
    "elem c : tC;\n"
    "elem r : tR;\n"
    "elem c' : tC2;\n"
    "elem m : tM;\n";

const char* kRepellencySrc =
    "rule R1: loop(~x){$X | b} => b | loop(~x){$X};\n"
    "rule R2: a | loop(~x){$X} => loop(~x){a | $X};\n";

const char* kAbsorptionSrc = "rule Rabs: c | loop(~x){$X} => loop(~x){$X | c'};\n";

}  // namespace

const cls::TypeEnv& gamma_ex() {
  static const cls::TypeEnv env = cls::parse_env(kGammaExSrc);
  return env;
}

const cls::TypeEnv& gamma_abs() {
  static const cls::TypeEnv env = cls::parse_env(kGammaAbsSrc);
  return env;
}

const std::vector<cls::Rule>& repellency_rules() {
  static const std::vector<cls::Rule> rules = cls::parse_rules(kRepellencySrc);
  return rules;
}

const std::vector<cls::Rule>& absorption_rules() {
  static const std::vector<cls::Rule> rules = cls::parse_rules(kAbsorptionSrc);
  return rules;
}

cls::Term t(const std::string& text) { return cls::parse_term(text); }

cls::Pattern pt(const std::string& text) { return cls::parse_pattern(text); }

cls::Sequence seq(const std::string& text) {
  if (text.empty() || text == "eps") return {};
  cls::Sequence out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, '.')) out.push_back(item);
  return out;
}

cls::Var var(const std::string& marked) {
  if (marked.size() < 2) throw std::logic_error("var needs a kind marker: " + marked);
  std::string name = marked.substr(1);
  switch (marked[0]) {
    case '$': return {cls::VarKind::Term, name};
    case '~': return {cls::VarKind::Seq, name};
    case '?': return {cls::VarKind::Elem, name};
    default: throw std::logic_error("var needs a kind marker: " + marked);
  }
}

cls::Instantiation sigma(const std::vector<std::pair<std::string, std::string>>& terms,
                         const std::vector<std::pair<std::string, std::string>>& seqs,
                         const std::vector<std::pair<std::string, std::string>>& elems) {
  cls::Instantiation s;
  for (const auto& [name, value] : terms) s.terms.emplace(name, t(value));
  for (const auto& [name, value] : seqs) s.seqs.emplace(name, seq(value));
  for (const auto& [name, value] : elems) s.elems.emplace(name, value);
  return s;
}

cls::Basis basis(const cls::TypeEnv& env, const std::vector<BasisRow>& rows) {
  cls::Basis b;
  for (const auto& row : rows) b.insert(var(row.var), {row.present, row.required}, env);
  return b;
}

std::vector<std::string> env_elements(const cls::TypeEnv& env) {
  std::vector<std::string> out;
  for (const auto& [name, type] : env.elements()) {
    (void)type;
    out.push_back(name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw trees.

namespace {

RawPtr mk(Raw::K k, std::string name, RawPtr a, RawPtr b) {
  auto r = std::make_shared<Raw>();
  r->k = k;
  r->name = std::move(name);
  r->a = std::move(a);
  r->b = std::move(b);
  return r;
}

bool is_eps_term(const RawPtr& r) {
  return r->k == Raw::K::TSeq && r->a->k == Raw::K::SEps;
}

}  // namespace

RawPtr seps() {
  static const RawPtr e = mk(Raw::K::SEps, "", nullptr, nullptr);
  return e;
}

RawPtr selem(std::string name) { return mk(Raw::K::SElem, std::move(name), nullptr, nullptr); }

RawPtr scat(RawPtr a, RawPtr b) { return mk(Raw::K::SCat, "", std::move(a), std::move(b)); }

RawPtr tseq(RawPtr s) { return mk(Raw::K::TSeq, "", std::move(s), nullptr); }

RawPtr tloop(RawPtr membrane, RawPtr content) {
  return mk(Raw::K::TLoop, "", std::move(membrane), std::move(content));
}

RawPtr tpar(RawPtr a, RawPtr b) { return mk(Raw::K::TPar, "", std::move(a), std::move(b)); }

std::string raw_text(const RawPtr& r) {
  switch (r->k) {
    case Raw::K::SEps: return "0";
    case Raw::K::SElem: return r->name;
    case Raw::K::SCat: return "(" + raw_text(r->a) + "." + raw_text(r->b) + ")";
    case Raw::K::TSeq: return "[" + raw_text(r->a) + "]";
    case Raw::K::TLoop: return "<" + raw_text(r->a) + ">" + raw_text(r->b);
    case Raw::K::TPar: return "{" + raw_text(r->a) + "|" + raw_text(r->b) + "}";
  }
  return "";
}

std::size_t raw_size(const RawPtr& r) {
  switch (r->k) {
    case Raw::K::SEps: return 0;
    case Raw::K::SElem: return 1;
    case Raw::K::SCat: return raw_size(r->a) + raw_size(r->b);
    case Raw::K::TSeq: return raw_size(r->a);
    case Raw::K::TLoop: return 1 + raw_size(r->a) + raw_size(r->b);
    case Raw::K::TPar: return raw_size(r->a) + raw_size(r->b);
  }
  return 0;
}

namespace {

cls::Sequence raw_seq(const RawPtr& r) {
  switch (r->k) {
    case Raw::K::SEps: return {};
    case Raw::K::SElem: return {r->name};
    case Raw::K::SCat: {
      cls::Sequence out = raw_seq(r->a);
      cls::Sequence rhs = raw_seq(r->b);
      out.insert(out.end(), rhs.begin(), rhs.end());
      return out;
    }
    default: throw std::logic_error("raw_seq on a term node");
  }
}

}  // namespace

cls::Term raw_to_term(const RawPtr& r) {
  switch (r->k) {
    case Raw::K::TSeq: {
      std::vector<cls::Component> cs;
      cls::push_seq_component(cs, raw_seq(r->a));
      return cls::make_term(std::move(cs));
    }
    case Raw::K::TLoop: {
      std::vector<cls::Component> cs;
      cls::push_loop_component(cs, raw_seq(r->a), raw_to_term(r->b));
      return cls::make_term(std::move(cs));
    }
    case Raw::K::TPar: return cls::par(raw_to_term(r->a), raw_to_term(r->b));
    default: throw std::logic_error("raw_to_term on a sequence node");
  }
}

namespace {

RawPtr random_raw_seq(Rng& rng, const std::vector<std::string>& alpha, int budget) {
  if (budget <= 0 || chance(rng, 0.2)) return seps();
  if (budget == 1 || chance(rng, 0.45)) return selem(pick(rng, alpha));
  int left = rnd(rng, 0, budget);
  return scat(random_raw_seq(rng, alpha, left), random_raw_seq(rng, alpha, budget - left));
}

RawPtr random_raw_term_at(Rng& rng, const std::vector<std::string>& alpha, int budget, int depth) {
  if (depth <= 0) return tseq(random_raw_seq(rng, alpha, budget));
  int shape = rnd(rng, 0, 99);
  if (shape < 40) return tseq(random_raw_seq(rng, alpha, budget));
  if (shape < 65 && budget >= 1) {
    int mem = rnd(rng, 0, budget - 1);
    return tloop(random_raw_seq(rng, alpha, mem),
                 random_raw_term_at(rng, alpha, budget - 1 - mem, depth - 1));
  }
  int left = rnd(rng, 0, budget);
  return tpar(random_raw_term_at(rng, alpha, left, depth - 1),
              random_raw_term_at(rng, alpha, budget - left, depth - 1));
}

}  // namespace

RawPtr random_raw_term(Rng& rng, const std::vector<std::string>& alphabet, int budget) {
  return random_raw_term_at(rng, alphabet, budget, 4);
}

/// Unit and empty-loop axioms are applied as contractions only: together with
/// the size-preserving moves (associativity, commutativity, rotation) the
/// fully-contracted forms of congruent trees meet, so closures intersect
/// exactly for congruent inputs.
std::vector<RawPtr> raw_neighbors(const RawPtr& n) {
  std::vector<RawPtr> out;
  switch (n->k) {
    case Raw::K::SEps:
    case Raw::K::SElem: break;
    case Raw::K::SCat: {
      const RawPtr& x = n->a;
      const RawPtr& y = n->b;
      if (x->k == Raw::K::SEps) out.push_back(y);
      if (y->k == Raw::K::SEps) out.push_back(x);
      if (x->k == Raw::K::SCat) out.push_back(scat(x->a, scat(x->b, y)));
      if (y->k == Raw::K::SCat) out.push_back(scat(scat(x, y->a), y->b));
      for (auto& m : raw_neighbors(x)) out.push_back(scat(m, y));
      for (auto& m : raw_neighbors(y)) out.push_back(scat(x, m));
      break;
    }
    case Raw::K::TSeq:
      for (auto& m : raw_neighbors(n->a)) out.push_back(tseq(m));
      break;
    case Raw::K::TLoop: {
      const RawPtr& mem = n->a;
      const RawPtr& body = n->b;
      if (mem->k == Raw::K::SEps && is_eps_term(body)) out.push_back(tseq(seps()));
      if (mem->k == Raw::K::SCat) out.push_back(tloop(scat(mem->b, mem->a), body));
      for (auto& m : raw_neighbors(mem)) out.push_back(tloop(m, body));
      for (auto& m : raw_neighbors(body)) out.push_back(tloop(mem, m));
      break;
    }
    case Raw::K::TPar: {
      const RawPtr& x = n->a;
      const RawPtr& y = n->b;
      out.push_back(tpar(y, x));
      if (is_eps_term(x)) out.push_back(y);
      if (is_eps_term(y)) out.push_back(x);
      if (x->k == Raw::K::TPar) out.push_back(tpar(x->a, tpar(x->b, y)));
      if (y->k == Raw::K::TPar) out.push_back(tpar(tpar(x, y->a), y->b));
      for (auto& m : raw_neighbors(x)) out.push_back(tpar(m, y));
      for (auto& m : raw_neighbors(y)) out.push_back(tpar(x, m));
      break;
    }
  }
  return out;
}

std::optional<std::set<std::string>> congruence_closure(const RawPtr& root, std::size_t limit) {
  std::set<std::string> seen{raw_text(root)};
  std::deque<RawPtr> queue{root};
  while (!queue.empty()) {
    RawPtr n = queue.front();
    queue.pop_front();
    for (auto& m : raw_neighbors(n)) {
      if (seen.insert(raw_text(m)).second) {
        if (seen.size() > limit) return std::nullopt;
        queue.push_back(std::move(m));
      }
    }
  }
  return seen;
}

std::optional<bool> congruent_raw(const RawPtr& a, const RawPtr& b, std::size_t limit) {
  auto ca = congruence_closure(a, limit);
  if (!ca) return std::nullopt;
  if (ca->count(raw_text(b)) != 0) return true;
  std::set<std::string> seen{raw_text(b)};
  std::deque<RawPtr> queue{b};
  while (!queue.empty()) {
    RawPtr n = queue.front();
    queue.pop_front();
    for (auto& m : raw_neighbors(n)) {
      auto txt = raw_text(m);
      if (ca->count(txt) != 0) return true;
      if (seen.insert(std::move(txt)).second) {
        if (seen.size() > limit) return std::nullopt;
        queue.push_back(std::move(m));
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Enumeration.

std::vector<cls::Term> enumerate_terms(std::size_t max_size,
                                       const std::vector<std::string>& alphabet) {
  std::vector<std::vector<cls::Sequence>> seqs(max_size + 1);
  seqs[0].push_back({});
  for (std::size_t len = 1; len <= max_size; ++len)
    for (const auto& shorter : seqs[len - 1])
      for (const auto& e : alphabet) {
        cls::Sequence s = shorter;
        s.push_back(e);
        seqs[len].push_back(std::move(s));
      }

  std::vector<std::vector<cls::Component>> comps(max_size + 1);
  std::vector<std::vector<cls::Term>> terms(max_size + 1);
  terms[0].push_back(cls::Term{});
  for (std::size_t s = 1; s <= max_size; ++s) {
    for (const auto& sq : seqs[s]) comps[s].push_back({cls::Component::Kind::Seq, sq, {}});
    for (std::size_t mem = 0; mem + 1 <= s; ++mem) {
      std::size_t inner = s - 1 - mem;
      for (const auto& m : seqs[mem]) {
        if (cls::least_rotation(m) != m) continue;  // one representative per membrane
        for (const auto& content : terms[inner]) {
          if (mem == 0 && content.empty()) continue;  // loop(eps){eps} is eps
          comps[s].push_back({cls::Component::Kind::Loop, m, content});
        }
      }
    }

    std::vector<std::pair<cls::Component, std::size_t>> pool;
    for (std::size_t k = 1; k <= s; ++k)
      for (const auto& c : comps[k]) pool.emplace_back(c, k);
    std::sort(pool.begin(), pool.end(),
              [](const auto& a, const auto& b) { return cls::compare(a.first, b.first) < 0; });

    std::vector<cls::Component> cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t rem) {
      if (rem == 0) {
        terms[s].push_back(cls::make_term(cur));
        return;
      }
      for (std::size_t i = start; i < pool.size(); ++i) {
        if (pool[i].second > rem) continue;
        cur.push_back(pool[i].first);
        rec(i, rem - pool[i].second);
        cur.pop_back();
      }
    };
    rec(0, s);
  }

  std::vector<cls::Term> out;
  for (const auto& bucket : terms) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

std::size_t pattern_size(const cls::Pattern& p) {
  std::size_t n = p.term_vars().size();
  for (const auto& c : p.components()) {
    n += c.items.size();
    if (c.kind == cls::PComponent::Kind::Loop) n += 1 + pattern_size(c.content);
  }
  return n;
}

std::vector<cls::Pattern> enumerate_patterns(std::size_t max_size, const PatternVocab& vocab) {
  std::vector<cls::PItem> items;
  for (const auto& e : vocab.elems) items.push_back({cls::PItem::Kind::Elem, e});
  for (const auto& n : vocab.evars) items.push_back({cls::PItem::Kind::EVar, n});
  for (const auto& n : vocab.svars) items.push_back({cls::PItem::Kind::SVar, n});

  std::vector<std::vector<std::vector<cls::PItem>>> tuples(max_size + 1);
  tuples[0].push_back({});
  for (std::size_t len = 1; len <= max_size; ++len)
    for (const auto& shorter : tuples[len - 1])
      for (const auto& it : items) {
        auto t2 = shorter;
        t2.push_back(it);
        tuples[len].push_back(std::move(t2));
      }

  std::vector<std::vector<cls::PComponent>> comps(max_size + 1);
  std::vector<std::vector<cls::Pattern>> pats(max_size + 1);
  pats[0].push_back(cls::Pattern{});

  for (std::size_t s = 1; s <= max_size; ++s) {
    for (const auto& tup : tuples[s]) comps[s].push_back({cls::PComponent::Kind::Seq, tup, {}});
    for (std::size_t mem = 0; mem + 1 <= s; ++mem) {
      std::size_t inner = s - 1 - mem;
      for (const auto& mt : tuples[mem])
        for (const auto& content : pats[inner])
          comps[s].push_back({cls::PComponent::Kind::Loop, mt, content});
    }

    std::vector<std::pair<cls::PComponent, std::size_t>> pool;
    for (std::size_t k = 1; k <= s; ++k)
      for (const auto& c : comps[k]) pool.emplace_back(c, k);
    std::sort(pool.begin(), pool.end(),
              [](const auto& a, const auto& b) { return cls::compare(a.first, b.first) < 0; });

    std::vector<cls::PComponent> cur;
    std::vector<std::string> tv;
    std::function<void(std::size_t, std::size_t)> fill_tvars = [&](std::size_t start,
                                                                   std::size_t rem) {
      if (rem == 0) {
        pats[s].push_back(cls::make_pattern(cur, tv));
        return;
      }
      for (std::size_t i = start; i < vocab.tvars.size(); ++i) {
        tv.push_back(vocab.tvars[i]);
        fill_tvars(i, rem - 1);
        tv.pop_back();
      }
    };
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t rem) {
      fill_tvars(0, rem);  // spend the remainder on term variables (possibly none)
      for (std::size_t i = start; i < pool.size(); ++i) {
        if (pool[i].second > rem) continue;
        cur.push_back(pool[i].first);
        rec(i, rem - pool[i].second);
        cur.pop_back();
      }
    };
    rec(0, s);
  }

  std::vector<cls::Pattern> out;
  for (const auto& bucket : pats) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force matcher.

namespace {

void collect_alpha(const cls::Term& t, std::set<std::string>& out) {
  for (const auto& c : t.components()) {
    for (const auto& e : c.seq) out.insert(e);
    if (c.kind == cls::Component::Kind::Loop) collect_alpha(c.content, out);
  }
}

void collect_par_nodes(const cls::Term& t, std::vector<cls::Term>& out) {
  out.push_back(t);
  for (const auto& c : t.components())
    if (c.kind == cls::Component::Kind::Loop) collect_par_nodes(c.content, out);
}

void count_occurrences(const cls::Pattern& p, std::map<cls::Var, std::size_t>& out) {
  for (const auto& c : p.components()) {
    for (const auto& it : c.items) {
      if (it.kind == cls::PItem::Kind::EVar) ++out[{cls::VarKind::Elem, it.name}];
      if (it.kind == cls::PItem::Kind::SVar) ++out[{cls::VarKind::Seq, it.name}];
    }
    if (c.kind == cls::PComponent::Kind::Loop) count_occurrences(c.content, out);
  }
  for (const auto& tv : p.term_vars()) ++out[{cls::VarKind::Term, tv}];
}

std::vector<cls::Sequence> all_seqs(const std::set<std::string>& alpha, std::size_t max_len) {
  std::vector<cls::Sequence> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& e : alpha) {
        cls::Sequence s = out[i];
        s.push_back(e);
        out.push_back(std::move(s));
      }
    begin = end;
  }
  return out;
}

std::vector<cls::Term> all_sub_multisets(const cls::Term& t) {
  std::set<cls::Term> acc;
  std::vector<cls::Term> nodes;
  collect_par_nodes(t, nodes);
  for (const auto& n : nodes) {
    const auto& cs = n.components();
    if (cs.size() > 16) throw std::logic_error("term too wide for the match oracle");
    for (std::uint32_t mask = 0; mask < (1u << cs.size()); ++mask) {
      std::vector<cls::Component> sel;
      for (std::size_t i = 0; i < cs.size(); ++i)
        if (mask & (1u << i)) sel.push_back(cs[i]);
      acc.insert(cls::make_term(std::move(sel)));
    }
  }
  return {acc.begin(), acc.end()};
}

bool vanish_ok(const cls::Pattern& p, const cls::Instantiation& s) {
  for (const auto& c : p.components()) {
    cls::Pattern single = cls::make_pattern({c}, {});
    if (cls::instantiate(single, s).empty()) {
      bool bare_svar = c.kind == cls::PComponent::Kind::Seq && c.items.size() == 1 &&
                       c.items[0].kind == cls::PItem::Kind::SVar;
      if (!bare_svar) return false;
    }
    if (c.kind == cls::PComponent::Kind::Loop && !vanish_ok(c.content, s)) return false;
  }
  return true;
}

}  // namespace

std::vector<cls::Instantiation> match_oracle(const cls::Pattern& p, const cls::Term& t) {
  auto vars = cls::pattern_vars(p);
  std::map<cls::Var, std::size_t> occ;
  count_occurrences(p, occ);
  std::set<std::string> alpha;
  collect_alpha(t, alpha);
  const std::size_t budget = t.size();
  const auto seq_cands = all_seqs(alpha, budget);
  const auto term_cands = all_sub_multisets(t);
  const std::vector<std::string> elem_cands(alpha.begin(), alpha.end());
  const std::vector<cls::Var> vs(vars.begin(), vars.end());

  std::vector<cls::Instantiation> found;
  cls::Instantiation cur;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t rem) {
    if (i == vs.size()) {
      if (cls::instantiate(p, cur) == t && vanish_ok(p, cur)) found.push_back(cur);
      return;
    }
    const cls::Var& v = vs[i];
    const std::size_t n = occ[v];
    switch (v.kind) {
      case cls::VarKind::Elem:
        if (rem < n) return;
        for (const auto& e : elem_cands) {
          cur.elems[v.name] = e;
          rec(i + 1, rem - n);
        }
        cur.elems.erase(v.name);
        break;
      case cls::VarKind::Seq:
        for (const auto& s : seq_cands) {
          std::size_t cost = n * s.size();
          if (cost > rem) continue;
          cur.seqs[v.name] = s;
          rec(i + 1, rem - cost);
        }
        cur.seqs.erase(v.name);
        break;
      case cls::VarKind::Term:
        for (const auto& tm : term_cands) {
          std::size_t cost = n * tm.size();
          if (cost > rem) continue;
          cur.terms[v.name] = tm;
          rec(i + 1, rem - cost);
        }
        cur.terms.erase(v.name);
        break;
    }
  };
  rec(0, budget);
  std::sort(found.begin(), found.end());
  return found;
}

// ---------------------------------------------------------------------------
// Random generators.

cls::TypeEnv random_env(Rng& rng) {
  cls::TypeEnv env;
  int nt = rnd(rng, 2, 4);
  std::vector<std::string> names;
  for (int i = 0; i < nt; ++i) names.push_back("t" + std::to_string(i));
  for (int i = 0; i < nt; ++i) {
    cls::TypeSet required, excluded;
    for (int j = 0; j < nt; ++j) {
      if (j == i) continue;
      int roll = rnd(rng, 0, 3);
      if (roll == 1) required.insert(names[j]);
      if (roll == 2) excluded.insert(names[j]);
    }
    env.add_type(names[i], std::move(required), std::move(excluded));
  }
  int ne = rnd(rng, 3, 5);
  const std::string pool = "abcde";
  for (int k = 0; k < ne; ++k)
    env.add_element(std::string(1, pool[k]), names[rnd(rng, 0, nt - 1)]);
  env.check_references();
  return env;
}

cls::Term random_term(Rng& rng, const std::vector<std::string>& elems, int budget, int depth) {
  std::vector<cls::Component> comps;
  if (elems.empty()) return {};
  while (budget > 0) {
    if (chance(rng, 0.35)) break;
    if (depth > 0 && chance(rng, 0.35)) {
      int mlen = rnd(rng, 0, std::min(2, budget - 1));
      cls::Sequence mem;
      for (int i = 0; i < mlen; ++i) mem.push_back(pick(rng, elems));
      int room = budget - 1 - mlen;
      cls::Term content = random_term(rng, elems, room > 0 ? rnd(rng, 0, room) : 0, depth - 1);
      budget -= 1 + mlen + static_cast<int>(content.size());
      cls::push_loop_component(comps, std::move(mem), std::move(content));
    } else {
      int len = rnd(rng, 1, std::min(3, budget));
      cls::Sequence s;
      for (int i = 0; i < len; ++i) s.push_back(pick(rng, elems));
      budget -= len;
      cls::push_seq_component(comps, std::move(s));
    }
  }
  return cls::make_term(std::move(comps));
}

cls::Pattern random_pattern(Rng& rng, const PatternVocab& vocab, int budget, int depth) {
  std::vector<cls::PComponent> comps;
  std::vector<std::string> tvars;
  auto item = [&](bool allow_svar) {
    std::vector<cls::PItem> choices;
    for (const auto& e : vocab.elems) choices.push_back({cls::PItem::Kind::Elem, e});
    for (const auto& n : vocab.evars) choices.push_back({cls::PItem::Kind::EVar, n});
    if (allow_svar)
      for (const auto& n : vocab.svars) choices.push_back({cls::PItem::Kind::SVar, n});
    return pick(rng, choices);
  };
  while (budget > 0) {
    if (chance(rng, 0.3)) break;
    if (!vocab.tvars.empty() && chance(rng, 0.25)) {
      tvars.push_back(pick(rng, vocab.tvars));
      budget -= 1;
      continue;
    }
    if (depth > 0 && chance(rng, 0.3)) {
      int mlen = rnd(rng, 0, std::min(2, budget - 1));
      std::vector<cls::PItem> mem;
      for (int i = 0; i < mlen; ++i) mem.push_back(item(true));
      int room = budget - 1 - mlen;
      cls::Pattern content =
          random_pattern(rng, vocab, room > 0 ? rnd(rng, 0, room) : 0, depth - 1);
      budget -= 1 + mlen + static_cast<int>(pattern_size(content));
      comps.push_back({cls::PComponent::Kind::Loop, std::move(mem), std::move(content)});
    } else {
      int len = rnd(rng, 1, std::min(3, budget));
      std::vector<cls::PItem> its;
      for (int i = 0; i < len; ++i) its.push_back(item(true));
      budget -= len;
      comps.push_back({cls::PComponent::Kind::Seq, std::move(its), {}});
    }
  }
  return cls::make_pattern(std::move(comps), std::move(tvars));
}

cls::Rule random_rule(Rng& rng, const std::vector<std::string>& elems, int id) {
  PatternVocab lhs_vocab{elems, {"u"}, {"x", "y"}, {"X"}};
  cls::Pattern lhs;
  for (int tries = 0; tries < 50 && lhs.empty(); ++tries)
    lhs = random_pattern(rng, lhs_vocab, 4);
  if (lhs.empty()) lhs = pt(elems.at(0));
  PatternVocab rhs_vocab{elems, {}, {}, {}};
  for (const auto& v : cls::pattern_vars(lhs)) {
    if (v.kind == cls::VarKind::Elem) rhs_vocab.evars.push_back(v.name);
    if (v.kind == cls::VarKind::Seq) rhs_vocab.svars.push_back(v.name);
    if (v.kind == cls::VarKind::Term) rhs_vocab.tvars.push_back(v.name);
  }
  cls::Rule r{"G" + std::to_string(id), lhs, random_pattern(rng, rhs_vocab, 4)};
  if (cls::validate_rule(r)) throw std::logic_error("random_rule built an invalid rule");
  return r;
}

std::optional<cls::Term> random_well_typed_term(Rng& rng, const cls::TypeEnv& env, int budget,
                                                int tries) {
  auto elems = env_elements(env);
  for (int i = 0; i < tries; ++i) {
    cls::Term cand = random_term(rng, elems, budget);
    if (cls::type_check(cand, env).ok()) return cand;
  }
  return std::nullopt;
}

std::optional<cls::Term> random_correct_system(Rng& rng, const cls::TypeEnv& env, int budget,
                                               int tries) {
  auto elems = env_elements(env);
  for (int i = 0; i < tries; ++i) {
    cls::Term cand = random_term(rng, elems, budget);
    auto r = cls::type_check(cand, env);
    if (r.ok() && r.type().required.empty()) return cand;
  }
  return std::nullopt;
}

cls::PrType random_pr_type(Rng& rng, const cls::TypeEnv& env) {
  cls::PrType t;
  for (const auto& [name, required] : env.types()) {
    (void)required;
    if (chance(rng, 0.35)) t.present.insert(name);
    if (chance(rng, 0.25)) t.required.insert(name);
  }
  return t;
}

cls::PrType random_wf_pr_type(Rng& rng, const cls::TypeEnv& env) {
  for (int i = 0; i < 100; ++i) {
    cls::PrType t = random_pr_type(rng, env);
    if (cls::well_formed(t, env)) return t;
  }
  return {};
}

Decomposition random_decomposition(Rng& rng, const cls::Term& whole) {
  std::vector<cls::Sequence> mems;
  std::vector<cls::Term> rests;
  cls::Term node = whole;
  for (;;) {
    const auto& cs = node.components();
    std::vector<std::size_t> loops;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (cs[i].kind == cls::Component::Kind::Loop) loops.push_back(i);
    if (!loops.empty() && chance(rng, 0.5)) {
      std::size_t idx = pick(rng, loops);
      std::vector<cls::Component> rest;
      for (std::size_t i = 0; i < cs.size(); ++i)
        if (i != idx) rest.push_back(cs[i]);
      rests.push_back(cls::make_term(std::move(rest)));
      mems.push_back(cs[idx].seq);
      node = cs[idx].content;
      continue;
    }
    std::vector<cls::Component> inner, rest;
    for (const auto& c : cs) (chance(rng, 0.5) ? inner : rest).push_back(c);
    cls::Term final_rest = cls::make_term(std::move(rest));
    cls::Context ctx;
    if (mems.empty()) {
      ctx.residual0 = final_rest;
    } else {
      ctx.residual0 = rests[0];
      for (std::size_t j = 0; j < mems.size(); ++j)
        ctx.layers.push_back({mems[j], j + 1 < rests.size() ? rests[j + 1] : final_rest});
    }
    Decomposition d{std::move(ctx), cls::make_term(std::move(inner))};
    if (cls::plug(d.context, d.inner) != whole)
      throw std::logic_error("random_decomposition does not rebuild its input");
    return d;
  }
}

// ---------------------------------------------------------------------------
// Six-constraint transcription.

namespace {

using TS = cls::TypeSet;

TS set_u(const TS& a, const TS& b) {
  TS r = a;
  r.insert(b.begin(), b.end());
  return r;
}

TS set_d(const TS& a, const TS& b) {
  TS r;
  for (const auto& x : a)
    if (b.count(x) == 0) r.insert(x);
  return r;
}

bool set_disjoint(const TS& a, const TS& b) {
  for (const auto& x : a)
    if (b.count(x) != 0) return false;
  return true;
}

bool set_subset(const TS& a, const TS& b) {
  for (const auto& x : a)
    if (b.count(x) == 0) return false;
  return true;
}

TS excl_set(const TS& p, const cls::TypeEnv& env) {
  TS r;
  for (const auto& t : p) {
    const TS& e = env.excluded_of_type(t);
    r.insert(e.begin(), e.end());
  }
  return r;
}

struct P2 {
  TS P, R;
};

bool wf2(const P2& t, const cls::TypeEnv& env) {
  TS x = excl_set(t.P, env);
  return set_disjoint(t.P, x) && set_disjoint(t.P, t.R) && set_disjoint(t.R, x);
}

bool ok2(const P2& a, const P2& b, const cls::TypeEnv& env) {
  if (!wf2(a, env) || !wf2(b, env)) return false;
  TS xa = excl_set(a.P, env);
  TS xb = excl_set(b.P, env);
  return set_disjoint(xa, b.P) && set_disjoint(xa, b.R) && set_disjoint(xb, a.P) &&
         set_disjoint(xb, a.R);
}

P2 conj2(const P2& a, const P2& b) {
  TS p = set_u(a.P, b.P);
  return {p, set_d(set_u(a.R, b.R), p)};
}

}  // namespace

bool six_constraints(const SixInput& in, const cls::TypeEnv& env) {
  P2 tau{in.tau.present, in.tau.required};
  P2 t1{in.t1.present, in.t1.required};
  P2 s1{in.s1.present, in.s1.required};
  P2 t2{in.t2.present, in.t2.required};
  P2 s2{in.s2.present, in.s2.required};

  if (!ok2(tau, t1, env)) return false;                                        // (1)
  P2 a = conj2(tau, t1);
  if (!ok2(s1, a, env)) return false;                                          // (2)
  if (!set_subset(a.R, s1.P)) return false;                                    // (3)
  P2 inner{s1.P, set_d(s1.R, set_u(tau.P, t1.P))};
  if (!ok2(inner, t2, env)) return false;                                      // (4)
  P2 b = conj2(inner, t2);
  if (!ok2(s2, b, env)) return false;                                          // (5)
  if (!set_subset(set_d(set_u(inner.R, t2.R), set_u(s1.P, t2.P)), s2.P)) return false;  // (6)
  return true;
}

cls::Context double_core(const cls::Sequence& s2mem, const cls::Term& t2res,
                         const cls::Sequence& s1mem, const cls::Term& t1res) {
  cls::Context c;
  c.layers.push_back({s2mem, t2res});
  c.layers.push_back({s1mem, t1res});
  return c;
}

// ---------------------------------------------------------------------------
// Subprocess helper.

namespace {

std::string temp_path(const std::string& suffix) {
  static std::atomic<int> counter{0};
  return "/tmp/cls_oracle_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
         suffix;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string write_temp(const std::string& content, const std::string& suffix) {
  std::string path = temp_path(suffix);
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

Proc run_cli(const std::string& args) {
  const char* bin = std::getenv("CLS_BIN");
  std::string outf = temp_path(".out");
  std::string errf = temp_path(".err");
  std::string cmd =
      std::string(bin ? bin : "cls") + " " + args + " >" + outf + " 2>" + errf;
  int rc = std::system(cmd.c_str());
  Proc p;
  p.status = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  p.out = slurp(outf);
  p.err = slurp(errf);
  std::remove(outf.c_str());
  std::remove(errf.c_str());
  return p;
}

std::string data_file(const std::string& name) {
  const char* dir = std::getenv("CLS_DATA");
  return std::string(dir ? dir : ".") + "/" + name;
}

}  // namespace oracle
