#include <doctest.h>

#include "test_support.hpp"
#include "vsm/inference.hpp"
#include "vsm/parser.hpp"

using namespace vsm;

namespace {

struct ModusPonens {
  KnowledgeBase kb = parse_kb("P(a, A).\nforall x: P(x, A) => Q(x, B).\n");
  Ensemble e;
  ModusPonens() {
    const std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    e = generate_ensemble(kb, jaccard_similarity(kb), SolveConfig{}, 5, seeds);
  }
  FormulaPtr f(const char* text) const { return parse_query_formula(text, kb).formula; }
};

const ModusPonens& mp() {
  static const ModusPonens instance;
  return instance;
}

}  // namespace

TEST_CASE("verdict aggregation") {
  CHECK(aggregate({true, true}).value == Truth::True);
  CHECK(aggregate({false, false}).value == Truth::False);
  const auto split = aggregate({true, false, true});
  CHECK(split.value == Truth::Unknown);
  CHECK(split.str() == "UNKNOWN (2/3 models agree)");
  CHECK(aggregate({true}).str() == "TRUE");
  CHECK(aggregate({false}).str() == "FALSE");
}

TEST_CASE("closed queries on the modus ponens ensemble") {
  const auto& m = mp();
  REQUIRE(m.e.size() == 5);
  CHECK(query_closed(m.e, *m.f("Q(a, B)"), m.kb).value == Truth::True);
  CHECK(query_closed(m.e, *m.f("P(a, a)"), m.kb).value == Truth::False);
  CHECK(query_closed(m.e, *m.f("exists y: P(a, y)"), m.kb).value == Truth::True);
  CHECK(query_closed(m.e, *m.f("P(a, A) or not P(a, A)"), m.kb).value == Truth::True);
  CHECK_THROWS_AS(query_closed(m.e, *make_atom(pred_id(0), Arg::variable("x"), Arg::constant(term_id(0))), m.kb),
                  FreeVariableError);
  CHECK_THROWS_AS(query_closed(Ensemble{}, *m.f("Q(a, B)"), m.kb), std::invalid_argument);
}

TEST_CASE("binding queries") {
  const auto& m = mp();
  const auto who = query_bindings(m.e, m.f("Q(?x, B)"), m.kb);
  CHECK(std::find(who.begin(), who.end(), *m.kb.find_term("a")) != who.end());
  CHECK(query_bindings(m.e, m.f("P(?x, ?x)"), m.kb).empty());
  CHECK_THROWS_AS(query_bindings(m.e, m.f("Q(a, B)"), m.kb), std::invalid_argument);

  auto kb = parse_kb("P(a, b).");
  const auto single = generate_ensemble(kb, jaccard_similarity(kb), SolveConfig{}, 1);
  REQUIRE(single.size() == 1);
  const auto bound = query_bindings(single, parse_query_formula("P(a, ?x)", kb).formula, kb);
  CHECK(bound == std::vector<TermId>{*kb.find_term("b")});
}

TEST_CASE("explanations") {
  const auto& m = mp();
  const auto text = explain(m.e, m.f("Q(a, B)"), m.kb);
  CHECK(text.find("model 4: true") != std::string::npos);
  CHECK(text.find("|r| = ") != std::string::npos);
  CHECK(text.find("delta = 0.1") != std::string::npos);
  CHECK(text.find("fired: ") != std::string::npos);
  CHECK(text.find("verdict: TRUE") != std::string::npos);

  const auto ex = explain(m.e, m.f("exists y: P(a, y)"), m.kb);
  CHECK(ex.find("witnesses: A") != std::string::npos);

  // split ensemble: one member moved so P(a, A) fails there
  Ensemble split = m.e;
  auto pts = split.models[1].points();
  pts.col(static_cast<Eigen::Index>(index(*m.kb.find_term("A")))).array() += 10.0;
  split.models[1] = split.models[1].with_points(pts);
  const auto v = query_closed(split, *m.f("P(a, A)"), m.kb);
  CHECK(v.value == Truth::Unknown);
  CHECK(explain(split, m.f("P(a, A)"), m.kb).find("model 1: false") != std::string::npos);
}

TEST_CASE("singleton ensembles agree with direct evaluation") {
  Random rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto kb = testing::random_kb(rng, 1 + testing::pick(rng, 4), 1 + testing::pick(rng, 2), 3, 1);
    const auto m = testing::random_model(rng, kb, 3, 0.4, TruthMode::Approximate);
    const auto f = testing::random_formula(rng, kb, 4);
    Ensemble e;
    e.add(m);
    const bool direct = eval_formula(m, *f, kb.domain());
    CHECK(query_closed(e, *f, kb).value == (direct ? Truth::True : Truth::False));
  }
}

TEST_CASE("adding a member never flips a verdict") {
  Random rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto kb = testing::random_kb(rng, 3, 2, 2, 0);
    Ensemble e;
    const auto f = testing::random_formula(rng, kb, 3);
    for (int k = 0; k < 4; ++k) {
      const auto before = e.empty() ? Truth::Unknown : query_closed(e, *f, kb).value;
      e.add(testing::random_model(rng, kb, 3, 0.5, TruthMode::Approximate));
      const auto after = query_closed(e, *f, kb).value;
      if (before == Truth::True) CHECK(after != Truth::False);
      if (before == Truth::False) CHECK(after != Truth::True);
    }
  }
}
