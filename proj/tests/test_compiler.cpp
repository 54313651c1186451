#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vsm/compiler.hpp"
#include "vsm/parser.hpp"

using namespace vsm;

namespace {

// Terms a, A, B on a line; P and Q both point along +x.
struct Line {
  KnowledgeBase kb = parse_kb("P(a, A).\nforall x: P(x, A) => Q(x, B).\n");
  ParameterLayout layout{1, 3, {{0}, {0}}};

  Eigen::VectorXd params(double a, double A, double B) const {
    Eigen::VectorXd p(5);
    p << a, A, B, 1, 1;
    return p;
  }
};

FormulaPtr formula(const KnowledgeBase& kb, const char* text) { return parse_query_formula(text, kb).formula; }

}  // namespace

TEST_CASE("soft truth") {
  CHECK(soft_truth(0.1, 0.1, 100.0) == doctest::Approx(0.5));
  CHECK(soft_truth(0.0, 0.1, 100.0) == doctest::Approx(1.0 / (1.0 + std::exp(-10.0))));
  CHECK(soft_truth(0.0, 0.1, 100.0) == doctest::Approx(0.9999546));
  for (double r : {0.0, 0.05, 0.3, 7.0}) {
    const double v = soft_truth(r, 0.1, 100.0);
    CHECK(v + (1.0 - v) == 1.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(soft_truth(1e6, 0.1, 100.0) == 0.0);
}

TEST_CASE("triple loss") {
  Line l;
  const auto t = compile_triple(l.kb.triples()[0], 0.1, l.layout);
  CHECK(t.value(l.layout, l.params(0, 1, 0)) == 0.0);
  CHECK(t.value(l.layout, l.params(0, 1.3, 0)) == doctest::Approx(0.04));
  CHECK(t.value(l.layout, l.params(0, 1.1 - 1e-9, 0)) == 0.0);
  CHECK(t.value(l.layout, l.params(0, 0.7, 0)) == doctest::Approx(0.04));
}

TEST_CASE("implication corner cases") {
  Line l;
  const auto imp = compile_ground_implication(formula(l.kb, "P(a, A) => Q(a, B)"), 0.1, 100.0, l.layout);
  CHECK(imp.kind == LossKind::AxiomInstance);
  CHECK(imp.value(l.layout, l.params(0, 5, 9)) == doctest::Approx(0.0).epsilon(1e-3));  // antecedent false
  CHECK(imp.value(l.layout, l.params(0, 1, 1)) == doctest::Approx(0.0).epsilon(1e-3));  // both true
  CHECK(imp.value(l.layout, l.params(0, 1, 5)) == doctest::Approx(1.0).epsilon(1e-3));  // violated
  CHECK_THROWS_AS(compile_ground_implication(formula(l.kb, "P(a, A) or Q(a, B)"), 0.1, 100.0, l.layout),
                  std::invalid_argument);
}

TEST_CASE("ground formulas") {
  Line l;
  auto neg = compile_ground_formula(formula(l.kb, "not P(a, A)"), 0.1, 100.0, l.layout);
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].value(l.layout, l.params(0, 1, 0)) == doctest::Approx(1.0).epsilon(1e-3));

  auto dis = compile_ground_formula(formula(l.kb, "P(a, A) or Q(a, B)"), 0.1, 100.0, l.layout);
  REQUIRE(dis.size() == 1);
  CHECK(dis[0].value(l.layout, l.params(0, 5, 5)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(dis[0].value(l.layout, l.params(0, 1, 5)) == doctest::Approx(0.0).epsilon(1e-3));

  auto con = compile_ground_formula(formula(l.kb, "P(a, A) and Q(a, B)"), 0.1, 100.0, l.layout);
  REQUIRE(con.size() == 2);
  CHECK(con[0].value(l.layout, l.params(0, 1, 1)) == 0.0);
  CHECK(con[1].value(l.layout, l.params(0, 1, 1)) == 0.0);
  CHECK(con[0].value(l.layout, l.params(0, 1, 5)) == 0.0);
  CHECK(con[1].value(l.layout, l.params(0, 1, 5)) > 0.0);

  CHECK_THROWS_AS(compile_ground_formula(formula(l.kb, "exists y: P(a, y)"), 0.1, 100.0, l.layout),
                  std::invalid_argument);
}

TEST_CASE("nested connectives stay Boolean at saturation") {
  // not (P or Q) is true only when both atoms fail
  Line l;
  auto f = compile_ground_formula(formula(l.kb, "not (P(a, A) or Q(a, B))"), 0.1, 1000.0, l.layout);
  REQUIRE(f.size() == 1);
  CHECK(f[0].value(l.layout, l.params(0, 5, 5)) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(f[0].value(l.layout, l.params(0, 1, 5)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f[0].value(l.layout, l.params(0, 1, 1)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("axiom unrolling") {
  Line l;
  const auto terms = compile_axiom(l.kb.axioms()[0], l.kb, 0.1, 100.0, l.layout);
  REQUIRE(terms.size() == 3);
  // P(a, A) held, Q(a, B) far off: only the a instance is violated
  const auto p = l.params(0, 1, 5);
  CHECK(terms[0].value(l.layout, p) > 0.9);
  CHECK(terms[0].label.find("@ a") != std::string::npos);
  CHECK(terms[1].value(l.layout, p) < 1e-3);
  CHECK(terms[2].value(l.layout, p) < 1e-3);
  CHECK(terms[0].value(l.layout, l.params(0, 1, 1)) < 1e-3);
}

TEST_CASE("similarity pair losses") {
  KnowledgeBase kb = parse_kb("P(x, y).\nP(y, z).\n");
  ParameterLayout layout(2, 3, {{0}});
  Eigen::Matrix3d v;
  v << 1, 0.5, 0.2, 0.5, 1, 0.6, 0.2, 0.6, 1;
  SimilarityMatrix s({"x", "y", "z"}, v);
  const auto losses = compile_similarity(s, layout);
  REQUIRE(losses.size() == 3);
  Eigen::VectorXd p(7);
  p << 0, 0, 0.5, 0, 5, 5, 1;  // D(x, y) = 0.5 = 1 - S
  CHECK(losses[0].value(layout, p) == doctest::Approx(0.0));
  p.segment(2, 2) << 0.5 / std::exp(1.0), 0;  // SD = e
  CHECK(losses[0].value(layout, p) == doctest::Approx(1.0));

  Random rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    for (Eigen::Index i = 0; i < 6; ++i) p[i] = rng.uniform(-1, 1);
    double sum = 0.0;
    for (const auto& l : losses) sum += l.value(layout, p);
    const ConstraintSystem sys(layout, {}, CompileConfig{});
    const auto m = sys.to_model(p);
    CHECK(std::abs(sum / 3.0 - disparity_score(s, m)) < 1e-12);
  }
}

TEST_CASE("gauge losses") {
  KnowledgeBase kb;
  kb.declare_term("u");
  kb.declare_term("w");
  ParameterLayout layout(2, 2, {});
  const auto g = compile_gauge(layout, kb);
  REQUIRE(g.size() == 2);
  Eigen::VectorXd p(4);
  p << -1, 0, 1, 0;  // centered, unit spread
  CHECK(g[0].value(layout, p) == 0.0);
  CHECK(g[1].value(layout, p) == 0.0);
  Eigen::VectorXd shifted = p;
  shifted << 2, 3, 4, 3;  // shift by (3, 3)
  CHECK(g[0].value(layout, shifted) == doctest::Approx(18.0));
  CHECK(g[1].value(layout, shifted) == doctest::Approx(0.0));
  CHECK(g[1].value(layout, 2.0 * p) == doctest::Approx(1.0));
}

TEST_CASE("compile_kb counts") {
  auto kb = parse_kb("P(a, b).");
  CompileConfig cfg;
  cfg.weights.similarity = 0.0;
  const auto sys = compile_kb(kb, jaccard_similarity(kb), cfg, 2, {{0}});
  CHECK(sys.count(LossKind::Triple) == 1);
  CHECK(sys.count(LossKind::GaugeCentroid) + sys.count(LossKind::GaugeScale) == 2);
  CHECK(sys.losses().size() == 3);

  auto kb4 = parse_kb("P(a, A).\nQ(c, c).\nforall x: P(x, A) => Q(x, B).\n");
  REQUIRE(kb4.num_terms() == 4);
  const auto sys4 = compile_kb(kb4, jaccard_similarity(kb4), CompileConfig{}, 2, {{0}, {1}});
  CHECK(sys4.count(LossKind::AxiomInstance) == 4);
  CHECK(sys4.count(LossKind::SimilarityPair) == 6);
  CHECK_THROWS_AS(compile_kb(kb4, jaccard_similarity(kb4), CompileConfig{}, 2, {{0}}), std::invalid_argument);
}

TEST_CASE("hard loss is zero exactly on satisfying models") {
  Random rng(31);
  int satisfied = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto kb = testing::random_kb(rng, 3, 2, 2, 1);
    if (testing::coin(rng)) kb.add_constraint(make_not(testing::random_ground_formula(rng, kb, 2)));
    const double delta = rng.uniform(0.2, 1.2);
    const auto m = testing::random_model(rng, kb, 3, delta, TruthMode::Approximate);
    std::vector<std::vector<Eigen::Index>> dims;
    for (const auto& r : m.relations()) dims.push_back(r.dims);
    CompileConfig cfg;
    cfg.delta = delta;
    const auto sys = compile_kb(kb, jaccard_similarity(kb), cfg, 3, dims);
    const auto p = sys.to_params(m);
    const bool sat = satisfies_kb(m, kb).satisfied;
    satisfied += sat;
    CHECK((sys.hard_loss(p) == 0.0) == sat);
  }
  CHECK(satisfied > 10);
}

TEST_CASE("gradient matches central differences") {
  Random rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto kb = testing::random_kb(rng, 4, 2, 4, 2);
    kb.add_constraint(make_or(testing::random_ground_formula(rng, kb, 2), testing::random_ground_formula(rng, kb, 1)));
    SolveConfig cfg;
    cfg.dimension = 4;
    cfg.delta = 0.3;
    cfg.sharpness = 5.0;
    const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
    const auto p = init_params(sys.layout(), rng);
    const auto g = sys.gradient(p);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      Eigen::VectorXd hi = p, lo = p;
      hi[i] += 1e-5;
      lo[i] -= 1e-5;
      const double fd = (sys.total_loss(hi) - sys.total_loss(lo)) / 2e-5;
      CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("model and parameter conversion") {
  auto kb = parse_kb("P(a, b).\nQ(b, c).\n");
  SolveConfig cfg;
  const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
  Random rng(1);
  const auto p = init_params(sys.layout(), rng);
  CHECK(sys.to_params(sys.to_model(p)).isApprox(p, 1e-15));
  CHECK(sys.layout().size() == 3 * 8 + 4 + 4);
}
