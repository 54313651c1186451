// Text format for knowledge bases and query formulas.
//
//   # comment
//   term a.                          optional declarations
//   pred P.
//   P(a, b).                         ground triple
//   forall x: P(x, A) => Q(x, B).    template axiom
//   not P(a, c).                     any other ground formula: a constraint
//   query q1: exists y: P(a, y).     closed query
//   query q2(?x): Q(?x, B).          single-variable binding query
//
// Formula precedence, loosest first: `=>` (right-assoc), `or`, `and`, `not`.
// Quantifier bodies extend as far right as possible.

#ifndef VSM_PARSER_HPP
#define VSM_PARSER_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/logic.hpp"

namespace vsm {

/// Lexical, syntactic and arity errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formed text that violates a KB rule: axiom outside the supported
/// template, unbound or extra free variables, unknown symbols where
/// declaration is not allowed, duplicate query names.
class SemanticError : public std::runtime_error {
 public:
  SemanticError(const std::string& what, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

KnowledgeBase parse_kb(std::string_view text);

/// A standalone formula against a fixed KB. Every symbol must already be
/// declared; at most one `?x` free variable is allowed.
NamedQuery parse_query_formula(std::string_view text, const KnowledgeBase& kb);

/// A file of `query` statements against a fixed KB.
std::vector<NamedQuery> parse_queries(std::string_view text, const KnowledgeBase& kb);

}  // namespace vsm

#endif  // VSM_PARSER_HPP
