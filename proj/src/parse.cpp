#include "cls/parse.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <utility>

namespace cls {

namespace {

std::string format_message(const std::string& msg, int line, int col,
                           const std::vector<std::string>& expected) {
  std::ostringstream os;
  os << "line " << line << ", column " << col << ": " << msg;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) os << ", ";
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

}  // namespace

ParseError::ParseError(std::string msg, int line_, int col_, std::vector<std::string> expected_)
    : std::runtime_error(format_message(msg, line_, col_, expected_)),
      line(line_),
      col(col_),
      expected(std::move(expected_)) {}

namespace {

enum class Tok {
  Ident,
  Dollar,
  Tilde,
  Question,
  Pipe,
  Dot,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semi,
  Colon,
  Comma,
  Arrow,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::string tok_name(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Dollar: return "'$'";
    case Tok::Tilde: return "'~'";
    case Tok::Question: return "'?'";
    case Tok::Pipe: return "'|'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Arrow: return "'=>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(text[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_cont(text[j])) ++j;
      t.kind = Tok::Ident;
      t.text = text.substr(i, j - i);
      while (i < j) advance(text[i++]);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '$': t.kind = Tok::Dollar; break;
      case '~': t.kind = Tok::Tilde; break;
      case '?': t.kind = Tok::Question; break;
      case '|': t.kind = Tok::Pipe; break;
      case '.': t.kind = Tok::Dot; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case ';': t.kind = Tok::Semi; break;
      case ':': t.kind = Tok::Colon; break;
      case ',': t.kind = Tok::Comma; break;
      case '=':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          t.kind = Tok::Arrow;
          advance(text[i++]);
          break;
        }
        throw ParseError("'=' must be followed by '>'", line, col);
      default: {
        std::string msg = "unexpected character '";
        msg += c;
        msg += '\'';
        throw ParseError(msg, line, col);
      }
    }
    advance(text[i++]);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

struct Cursor {
  std::vector<Token> toks;
  std::size_t i = 0;

  const Token& peek() const { return toks[i]; }
  Token get() { return toks[i + 1 < toks.size() ? i++ : i]; }
  bool at(Tok k) const { return toks[i].kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && toks[i].text == w; }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) {
      throw ParseError("unexpected " + tok_name(peek().kind) +
                           (peek().kind == Tok::Ident ? " '" + peek().text + "'" : ""),
                       peek().line, peek().col, {what});
    }
    return get();
  }
};

bool reserved_word(const std::string& s) { return s == "loop" || s == "eps"; }

/// Per-scope variable kind registry; a rule's two sides share one scope.
struct VarScope {
  std::map<std::string, VarKind> kinds;

  void note(const std::string& name, VarKind k, int line, int col) {
    auto [it, inserted] = kinds.emplace(name, k);
    if (!inserted && it->second != k) {
      Var before{it->second, name};
      Var now{k, name};
      throw KindError("variable '" + name + "' was introduced as '" + before.display() +
                          "' but is used here as '" + now.display() + "'",
                      line, col);
    }
  }
};

struct PatternParser {
  Cursor& cur;
  bool allow_vars;
  VarScope& scope;

  Pattern parse_par() {
    std::vector<PComponent> comps;
    std::vector<std::string> tvars;
    while (true) {
      parse_item(comps, tvars);
      if (cur.at(Tok::Pipe)) {
        cur.get();
        continue;
      }
      break;
    }
    return make_pattern(std::move(comps), std::move(tvars));
  }

  void parse_item(std::vector<PComponent>& comps, std::vector<std::string>& tvars) {
    const Token& t = cur.peek();
    if (t.kind == Tok::Ident && t.text == "eps") {
      cur.get();
      return;
    }
    if (t.kind == Tok::Ident && t.text == "loop") {
      comps.push_back(parse_loop());
      return;
    }
    if (t.kind == Tok::Dollar) {
      Token marker = cur.get();
      if (!allow_vars) {
        throw ParseError("variables are not allowed in terms", marker.line, marker.col);
      }
      Token name = cur.expect(Tok::Ident, "variable name");
      if (cur.at(Tok::Dot)) {
        throw ParseError("'$' variables may only appear as whole parallel items",
                         cur.peek().line, cur.peek().col);
      }
      scope.note(name.text, VarKind::Term, name.line, name.col);
      tvars.push_back(name.text);
      return;
    }
    if (t.kind == Tok::Ident || t.kind == Tok::Tilde || t.kind == Tok::Question) {
      PComponent pc;
      pc.kind = PComponent::Kind::Seq;
      pc.items = parse_seq_items();
      comps.push_back(std::move(pc));
      return;
    }
    throw ParseError("unexpected " + tok_name(t.kind), t.line, t.col,
                     allow_vars
                         ? std::vector<std::string>{"identifier", "'loop'", "'eps'", "'$'", "'~'", "'?'"}
                         : std::vector<std::string>{"identifier", "'loop'", "'eps'"});
  }

  PComponent parse_loop() {
    cur.get();  // "loop"
    cur.expect(Tok::LParen, "'('");
    PComponent pc;
    pc.kind = PComponent::Kind::Loop;
    if (cur.at_word("eps")) {
      cur.get();
    } else {
      pc.items = parse_seq_items();
    }
    cur.expect(Tok::RParen, "')'");
    if (cur.at(Tok::LBrace)) {
      cur.get();
      if (!cur.at(Tok::RBrace)) pc.content = parse_par();
      cur.expect(Tok::RBrace, "'}'");
    }
    return pc;
  }

  std::vector<PItem> parse_seq_items() {
    std::vector<PItem> items;
    while (true) {
      items.push_back(parse_pitem());
      if (cur.at(Tok::Dot)) {
        cur.get();
        continue;
      }
      break;
    }
    return items;
  }

  PItem parse_pitem() {
    const Token& t = cur.peek();
    if (t.kind == Tok::Ident) {
      if (reserved_word(t.text)) {
        throw ParseError("reserved word '" + t.text + "' cannot be used as an element", t.line,
                         t.col);
      }
      if (!std::islower(static_cast<unsigned char>(t.text[0]))) {
        throw ParseError("element names start with a lowercase letter", t.line, t.col);
      }
      return {PItem::Kind::Elem, cur.get().text};
    }
    if (t.kind == Tok::Tilde || t.kind == Tok::Question) {
      Token marker = cur.get();
      if (!allow_vars) {
        throw ParseError("variables are not allowed in terms", marker.line, marker.col);
      }
      Token name = cur.expect(Tok::Ident, "variable name");
      VarKind k = marker.kind == Tok::Tilde ? VarKind::Seq : VarKind::Elem;
      scope.note(name.text, k, name.line, name.col);
      return {marker.kind == Tok::Tilde ? PItem::Kind::SVar : PItem::Kind::EVar, name.text};
    }
    if (t.kind == Tok::Dollar) {
      throw ParseError("'$' variables may only appear as whole parallel items", t.line, t.col);
    }
    throw ParseError("unexpected " + tok_name(t.kind), t.line, t.col,
                     std::vector<std::string>{"identifier", "'~'", "'?'"});
  }
};

Pattern parse_one_pattern(Cursor& cur, bool allow_vars, VarScope& scope) {
  PatternParser pp{cur, allow_vars, scope};
  return pp.parse_par();
}

}  // namespace

Term parse_term(const std::string& text) {
  Cursor cur{lex(text)};
  VarScope scope;
  Pattern p = parse_one_pattern(cur, /*allow_vars=*/false, scope);
  cur.expect(Tok::End, "end of input");
  return to_term(p);
}

Pattern parse_pattern(const std::string& text) {
  Cursor cur{lex(text)};
  VarScope scope;
  Pattern p = parse_one_pattern(cur, /*allow_vars=*/true, scope);
  cur.expect(Tok::End, "end of input");
  return p;
}

std::vector<Rule> parse_rules(const std::string& text) {
  Cursor cur{lex(text)};
  std::vector<Rule> rules;
  std::set<std::string> names;
  while (!cur.at(Tok::End)) {
    const Token& kw = cur.peek();
    if (!(kw.kind == Tok::Ident && kw.text == "rule")) {
      throw ParseError("unexpected " + tok_name(kw.kind) +
                           (kw.kind == Tok::Ident ? " '" + kw.text + "'" : ""),
                       kw.line, kw.col, {"'rule'"});
    }
    cur.get();
    Token name = cur.expect(Tok::Ident, "rule name");
    if (!names.insert(name.text).second) {
      throw ParseError("duplicate rule name '" + name.text + "'", name.line, name.col);
    }
    cur.expect(Tok::Colon, "':'");
    VarScope scope;
    Rule r;
    r.name = name.text;
    r.lhs = parse_one_pattern(cur, /*allow_vars=*/true, scope);
    cur.expect(Tok::Arrow, "'=>'");
    r.rhs = parse_one_pattern(cur, /*allow_vars=*/true, scope);
    cur.expect(Tok::Semi, "';'");
    if (auto err = validate_rule(r)) {
      throw ParseError("rule '" + r.name + "': " + err->message, name.line, name.col);
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

namespace {

struct SetMention {
  std::string name;
  int line = 0;
  int col = 0;
};

TypeSet parse_type_set(Cursor& cur, std::vector<SetMention>& mentions) {
  cur.expect(Tok::LBrace, "'{'");
  TypeSet out;
  if (cur.at(Tok::RBrace)) {
    cur.get();
    return out;
  }
  while (true) {
    Token t = cur.expect(Tok::Ident, "basic type name");
    out.insert(t.text);
    mentions.push_back({t.text, t.line, t.col});
    if (cur.at(Tok::Comma)) {
      cur.get();
      continue;
    }
    break;
  }
  cur.expect(Tok::RBrace, "'}'");
  return out;
}

}  // namespace

TypeEnv parse_env(const std::string& text) {
  Cursor cur{lex(text)};
  TypeEnv env;
  std::vector<SetMention> mentions;
  bool elems_started = false;
  while (!cur.at(Tok::End)) {
    const Token& kw = cur.peek();
    if (kw.kind == Tok::Ident && kw.text == "type") {
      if (elems_started) {
        throw ParseError("'type' declarations must precede 'elem' declarations", kw.line, kw.col);
      }
      cur.get();
      Token name = cur.expect(Tok::Ident, "basic type name");
      TypeSet req, excl;
      if (cur.at_word("requires")) {
        cur.get();
        req = parse_type_set(cur, mentions);
      }
      if (cur.at_word("excludes")) {
        cur.get();
        excl = parse_type_set(cur, mentions);
      }
      cur.expect(Tok::Semi, "';'");
      try {
        env.add_type(name.text, std::move(req), std::move(excl));
      } catch (const EnvError& e) {
        throw ParseError(e.what(), name.line, name.col);
      }
      continue;
    }
    if (kw.kind == Tok::Ident && kw.text == "elem") {
      cur.get();
      Token name = cur.expect(Tok::Ident, "element name");
      if (!std::islower(static_cast<unsigned char>(name.text[0]))) {
        throw ParseError("element names start with a lowercase letter", name.line, name.col);
      }
      cur.expect(Tok::Colon, "':'");
      Token type = cur.expect(Tok::Ident, "basic type name");
      cur.expect(Tok::Semi, "';'");
      elems_started = true;
      try {
        env.add_element(name.text, type.text);
      } catch (const EnvError& e) {
        throw ParseError(e.what(), type.line, type.col);
      }
      continue;
    }
    throw ParseError("unexpected " + tok_name(kw.kind) +
                         (kw.kind == Tok::Ident ? " '" + kw.text + "'" : ""),
                     kw.line, kw.col, {"'type'", "'elem'"});
  }
  for (const auto& m : mentions) {
    if (!env.has_type(m.name)) {
      throw ParseError("basic type '" + m.name + "' is not declared", m.line, m.col);
    }
  }
  return env;
}

}  // namespace cls
