#include <doctest.h>

#include "test_support.hpp"
#include "vsm/geometry.hpp"
#include "vsm/model_io.hpp"
#include "vsm/parser.hpp"

using namespace vsm;

namespace {

// Terms a, b under a single predicate P on axis 0 of R^2.
VectorModel two_point_model(Eigen::Vector2d b, double delta = 0.1, TruthMode mode = TruthMode::Approximate) {
  Eigen::MatrixXd pts(2, 2);
  pts.col(0) = Eigen::Vector2d(0, 0);
  pts.col(1) = b;
  PredicateEmbedding p{{0}, Eigen::VectorXd::Ones(1)};
  return VectorModel(pts, {p}, delta, mode);
}

const TermId a = term_id(0), b = term_id(1);
const PredId P = pred_id(0);

}  // namespace

TEST_CASE("relation residual") {
  CHECK(relation_residual(two_point_model({1, 5}), P, a, b)[0] == doctest::Approx(0.0));
  CHECK(relation_residual(two_point_model({-1, 0}), P, a, b)[0] == doctest::Approx(-2.0));
  CHECK(relation_residual(two_point_model({1.05, 3}), P, a, b)[0] == doctest::Approx(0.05));
}

TEST_CASE("atom truth") {
  CHECK(atom_truth(two_point_model({1.05, 3}), P, a, b));
  CHECK_FALSE(atom_truth(two_point_model({1.2, 3}), P, a, b));
  // strict mode only looks at direction
  CHECK(atom_truth(two_point_model({0.5, 7}, 0.1, TruthMode::Strict), P, a, b));
  CHECK_FALSE(atom_truth(two_point_model({-0.5, 7}, 0.1, TruthMode::Strict), P, a, b));
  CHECK_FALSE(atom_truth(two_point_model({0, 7}, 0.1, TruthMode::Strict), P, a, b));
  // self loop: zero difference, residual |-d| = 1
  CHECK_FALSE(atom_truth(two_point_model({1, 0}), P, a, a));
}

TEST_CASE("angle between is accurate near zero") {
  Eigen::Vector2d u(1, 0), v(1, 1e-9);
  CHECK(angle_between(u, v) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("model validation") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(VectorModel(pts, {PredicateEmbedding{{0}, Eigen::VectorXd::Constant(1, 2.0)}}, 0.1, TruthMode::Strict),
                  std::invalid_argument);
  CHECK_THROWS_AS(VectorModel(pts, {PredicateEmbedding{{1, 0}, Eigen::Vector2d(1, 0)}}, 0.1, TruthMode::Strict),
                  std::invalid_argument);
  CHECK_THROWS_AS(VectorModel(pts, {PredicateEmbedding{{0, 1, 2}, Eigen::Vector3d(1, 0, 0)}}, 0.1, TruthMode::Strict),
                  std::invalid_argument);
}

TEST_CASE("formula evaluation") {
  auto kb = parse_kb("P(a, b).");
  const auto m = two_point_model({1, 0});
  const auto domain = kb.domain();
  auto eval = [&](const char* text) { return eval_formula(m, *parse_query_formula(text, kb).formula, domain); };
  CHECK(eval("exists x: P(a, x)"));
  CHECK_FALSE(eval("forall x: P(a, x)"));
  CHECK_FALSE(eval("not P(a, b)"));
  CHECK(eval("P(b, a) => P(a, a)"));
  CHECK(eval("forall x: exists y: P(x, y) or P(y, x)"));
  CHECK_THROWS_AS(eval_formula(m, *make_atom(P, Arg::variable("x"), Arg::constant(a)), domain), FreeVariableError);
}

TEST_CASE("satisfaction reports") {
  auto kb = parse_kb("P(a, b).");
  CHECK(satisfies_kb(two_point_model({1, 0}), kb).satisfied);
  const auto off = satisfies_kb(two_point_model({1.2, 0}), kb);
  CHECK_FALSE(off.satisfied);
  REQUIRE(off.violations.size() == 1);
  CHECK(off.violations[0].description == "P(a, b)");

  auto mp = parse_kb("P(a, A).\nforall x: P(x, A) => Q(x, B).\n");
  Eigen::MatrixXd pts(1, 3);
  pts << 0, 1, 5;  // a, A, B
  VectorModel m(pts, {PredicateEmbedding{{0}, Eigen::VectorXd::Ones(1)}, PredicateEmbedding{{0}, Eigen::VectorXd::Ones(1)}},
                0.1, TruthMode::Approximate);
  const auto r = satisfies_kb(m, mp);
  CHECK_FALSE(r.satisfied);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::AxiomInstance);
  CHECK(r.violations[0].description.find("@ a") != std::string::npos);
}

TEST_CASE("induced relations") {
  auto kb = parse_kb("P(a, b).");
  auto rel = induced_relations(two_point_model({1, 0}), kb);
  CHECK(rel.holds(P, a, b));
  CHECK_FALSE(rel.holds(P, b, a));
  CHECK((rel.tables[0].count() == 1));
  auto wide = induced_relations(two_point_model({1, 0}, 100.0), kb);
  CHECK((wide.tables[0].count() == 4));

  Random rng(3);
  KnowledgeBase k3;
  for (const char* n : {"x", "y", "z"}) k3.declare_term(n);
  k3.declare_predicate("R");
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_model(rng, k3, 3, 0.4, TruthMode::Approximate);
    const auto ir = induced_relations(m, k3);
    for (std::size_t h = 0; h < 3; ++h) {
      for (std::size_t t = 0; t < 3; ++t) {
        const bool direct = relation_residual(m, pred_id(0), term_id(h), term_id(t)).norm() < 0.4;
        CHECK(ir.holds(pred_id(0), term_id(h), term_id(t)) == direct);
      }
    }
  }
}

TEST_CASE("translation keeps satisfaction") {
  auto kb = parse_kb("P(a, b).");
  const auto m = two_point_model({1, 0});
  CHECK(transform_translate(m, Eigen::Vector2d::Zero()).points() == m.points());
  const auto moved = transform_translate(m, Eigen::Vector2d(5, -3));
  CHECK(satisfies_kb(moved, kb).satisfied);
  CHECK_THROWS_AS(transform_translate(m, Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST_CASE("invariances on random models") {
  Random rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto kb = testing::random_kb(rng, 4, 2, 0, 0);
    const auto m = testing::random_model(rng, kb, 4, rng.uniform(0.05, 1.0), TruthMode::Approximate);
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = rng.uniform(-10, 10);
    CHECK(induced_relations(transform_translate(m, v), kb) == induced_relations(m, kb));

    const auto strict = m.with_mode(TruthMode::Strict);
    for (double lambda : {0.1, 2.0, 10.0}) {
      CHECK(induced_relations(transform_scale(strict, lambda), kb) == induced_relations(strict, kb));
    }
    // widening delta only adds atoms
    const auto small = induced_relations(m, kb);
    const auto big = induced_relations(m.with_delta(m.delta() * 2), kb);
    for (std::size_t p = 0; p < 2; ++p) CHECK(((small.tables[p] && !big.tables[p]).count() == 0));
  }
}

TEST_CASE("full-dimensional predicate pins shared tails together") {
  Random rng(8);
  KnowledgeBase kb;
  for (const char* n : {"A", "B", "C"}) kb.declare_term(n);
  kb.declare_predicate("P");
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = 0.01;
    Eigen::MatrixXd pts(3, 3);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform(-1, 1);
    Eigen::Vector3d d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    d.normalize();
    pts.col(1) = pts.col(0) + d + Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * delta;
    pts.col(2) = pts.col(0) + d + Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * delta;
    VectorModel m(pts, {PredicateEmbedding{{0, 1, 2}, d}}, delta, TruthMode::Approximate);
    if (atom_truth(m, P, term_id(0), term_id(1)) && atom_truth(m, P, term_id(0), term_id(2))) {
      CHECK((pts.col(1) - pts.col(2)).norm() < 2 * delta);
    }
  }
}

TEST_CASE("model documents round-trip exactly") {
  Random rng(21);
  auto kb = testing::random_kb(rng, 4, 2, 3, 0);
  const auto m = testing::random_model(rng, kb, 5, 0.1, TruthMode::Strict);
  const auto text = write_model(m, kb);
  const auto back = read_model(text, kb);
  CHECK(back.points() == m.points());
  CHECK(back.mode() == TruthMode::Strict);
  for (std::size_t p = 0; p < 2; ++p) {
    CHECK(back.relation(pred_id(p)).dims == m.relation(pred_id(p)).dims);
    CHECK(back.relation(pred_id(p)).direction == m.relation(pred_id(p)).direction);
  }
  CHECK(write_model(back, kb) == text);
  CHECK_THROWS(read_model("{\"dimension\": 2}", kb));
}
