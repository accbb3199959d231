#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cls/pattern.hpp"
#include "cls/rewrite.hpp"
#include "cls/term.hpp"
#include "cls/types.hpp"

namespace cls {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col, std::vector<std::string> expected = {});
  int line = 0;
  int col = 0;
  std::vector<std::string> expected;
};

/// Same variable name used with two different kind markers.
struct KindError : ParseError {
  using ParseError::ParseError;
};

/// Grammar (whitespace-insensitive, "#" starts a line comment):
///   term   := par ;  par := item ("|" item)* ;  item := seq | loop | "eps"
///   loop   := "loop" "(" seqbody ")" ("{" term "}")?
///   seq    := pitem ("." pitem)* ;  seqbody := seq | "eps"
///   pitem  := IDENT | "$" IDENT | "~" IDENT | "?" IDENT
/// "$" variables are only legal as whole parallel items. "loop" and "eps" are
/// reserved words. Element names match [a-z][a-zA-Z0-9_']*.
Term parse_term(const std::string& text);
Pattern parse_pattern(const std::string& text);

/// `rule NAME: PATTERN => PATTERN ;` per rule, "#" comments. Variable kinds
/// must be consistent across a rule's two sides; every rule must validate
/// (nonempty lhs, rhs variables bound); duplicate names are errors.
std::vector<Rule> parse_rules(const std::string& text);

/// `type t requires {t1,t2} excludes {t3};` then `elem a : t;` lines. Both
/// clauses optional (default empty), `requires` before `excludes`; all type
/// lines precede elem lines; duplicates and undeclared references are errors.
TypeEnv parse_env(const std::string& text);

}  // namespace cls
