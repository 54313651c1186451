#include <doctest.h>

#include "vsm/parser.hpp"

using namespace vsm;

TEST_CASE("minimal triple") {
  auto kb = parse_kb("P(a,b).");
  CHECK(kb.num_terms() == 2);
  CHECK(kb.num_predicates() == 1);
  REQUIRE(kb.triples().size() == 1);
  CHECK(kb.name(kb.triples()[0].head) == "a");
  CHECK(kb.name(kb.triples()[0].tail) == "b");
}

TEST_CASE("template axiom") {
  auto kb = parse_kb("forall x: P(x,A) => Q(x,B).");
  REQUIRE(kb.axioms().size() == 1);
  const auto& ax = kb.axioms()[0];
  CHECK(kb.name(ax.antecedent_pred) == "P");
  CHECK(kb.name(ax.antecedent_const) == "A");
  CHECK(kb.name(ax.consequent_pred) == "Q");
  CHECK(kb.name(ax.consequent_const) == "B");
  CHECK(kb.num_terms() == 2);
}

TEST_CASE("implicit declarations follow first use") {
  auto kb = parse_kb("Q(c, a).\nP(a, b).\n");
  CHECK(kb.name(term_id(0)) == "c");
  CHECK(kb.name(term_id(1)) == "a");
  CHECK(kb.name(term_id(2)) == "b");
  CHECK(kb.name(pred_id(0)) == "Q");
}

TEST_CASE("arity error carries a position") {
  try {
    parse_kb("P(a, b).\nP(a,b,c).\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_kb("P(a)."), ParseError);
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_kb("P(a, b)"), ParseError);
  CHECK_THROWS_AS(parse_kb("P(a, b) and."), ParseError);
  CHECK_THROWS_AS(parse_kb("forall : P(x, a)."), ParseError);
}

TEST_CASE("semantic errors") {
  CHECK_THROWS_AS(parse_kb("forall x: P(x, A) => Q(A, x)."), SemanticError);
  CHECK_THROWS_AS(parse_kb("forall x: P(x, A)."), SemanticError);
  // unbound identifiers are terms, so this is a ground constraint
  CHECK(parse_kb("P(x, a) or Q(y, b).").constraints().size() == 1);
}

TEST_CASE("constraints and queries") {
  auto kb = parse_kb(
      "P(a, b).\n"
      "not P(b, a).\n"
      "query q1: exists y: P(a, y).\n"
      "query q2(?x): P(?x, b).\n");
  CHECK(kb.constraints().size() == 1);
  REQUIRE(kb.queries().size() == 2);
  CHECK_FALSE(kb.queries()[0].free_var.has_value());
  CHECK(kb.queries()[1].free_var == std::optional<std::string>("x"));
  CHECK_THROWS_AS(parse_kb("P(a,b).\nquery q: P(a, ?y).\n"), SemanticError);
  CHECK_THROWS_AS(parse_kb("P(a,b).\nquery q: P(a,b).\nquery q: P(b,a).\n"), SemanticError);
}

TEST_CASE("precedence and associativity") {
  auto kb = parse_kb("P(a, b).");
  auto f = parse_query_formula("not P(a,b) and P(b,a) or P(a,a) => P(b,b) => P(a,b)", kb).formula;
  REQUIRE(f->kind == FormulaKind::Implies);
  CHECK(f->left->kind == FormulaKind::Or);
  CHECK(f->left->left->kind == FormulaKind::And);
  CHECK(f->left->left->left->kind == FormulaKind::Not);
  CHECK(f->right->kind == FormulaKind::Implies);

  auto q = parse_query_formula("forall x: P(x, a) or P(a, x)", kb).formula;
  REQUIRE(q->kind == FormulaKind::Forall);
  CHECK(q->left->kind == FormulaKind::Or);
}

TEST_CASE("query formulas cannot introduce symbols") {
  auto kb = parse_kb("P(a, b).");
  CHECK_THROWS_AS(parse_query_formula("P(a, zzz)", kb), SemanticError);
  CHECK_THROWS_AS(parse_query_formula("R(a, b)", kb), SemanticError);
  auto q = parse_query_formula("P(?x, b)", kb);
  CHECK(q.free_var == std::optional<std::string>("x"));
  CHECK_THROWS_AS(parse_query_formula("P(?x, ?y)", kb), SemanticError);
}

TEST_CASE("comments and declarations") {
  auto kb = parse_kb("# header\nterm z.  # trailing\npred R.\nR(z, z).\n");
  CHECK(kb.num_terms() == 1);
  CHECK(kb.triples().size() == 1);
}
