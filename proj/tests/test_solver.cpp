#include <doctest.h>

#include "test_support.hpp"
#include "vsm/parser.hpp"
#include "vsm/solver.hpp"

using namespace vsm;

TEST_CASE("subspace choice") {
  CHECK(choose_subspace("P", 1, {}) == std::vector<Eigen::Index>{0});
  CHECK(choose_subspace("P", 8, {}) == choose_subspace("P", 8, {}));
  const auto p = choose_subspace("P", 8, {});
  const auto q = choose_subspace("Q", 8, {});
  CHECK(p.size() == 4);
  CHECK(q.size() == 4);
  CHECK(std::is_sorted(p.begin(), p.end()));
  CHECK(choose_subspace("P", 8, {SubspacePolicy::Kind::Full, 0}).size() == 8);
  CHECK_THROWS_AS(choose_subspace("P", 3, {SubspacePolicy::Kind::Fixed, 4}), std::invalid_argument);
  CHECK(SubspacePolicy::parse("3").axes(8) == 3);
  CHECK(SubspacePolicy::parse("half").axes(9) == 4);
  CHECK(SubspacePolicy::parse("full").str() == "full");
  CHECK_THROWS_AS(SubspacePolicy::parse("0"), std::invalid_argument);
  CHECK_THROWS_AS(SubspacePolicy::parse("many"), std::invalid_argument);
}

TEST_CASE("random draws are reproducible") {
  Random a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const double u = a.uniform(0, 1);
    CHECK(u == b.uniform(0, 1));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.gaussian() == b.gaussian());
  CHECK(a.next() != c.next());
}

TEST_CASE("parameter initialization") {
  auto kb = parse_kb("P(a, b).\nQ(b, c).\n");
  const auto sys = build_system(kb, jaccard_similarity(kb), SolveConfig{});
  Random r1(5), r2(5), r3(6);
  const auto p1 = init_params(sys.layout(), r1);
  CHECK(p1 == init_params(sys.layout(), r2));
  CHECK(p1 != init_params(sys.layout(), r3));
  for (std::size_t p = 0; p < 2; ++p) CHECK(std::abs(sys.layout().direction(p1, pred_id(p)).norm() - 1.0) < 1e-9);
  const Eigen::Index points = 3 * 8;
  CHECK(p1.head(points).cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("single triple converges") {
  auto kb = parse_kb("P(a, b).");
  SolveConfig cfg;
  cfg.dimension = 2;
  cfg.max_iters = 2000;
  const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
  Random rng(0);
  const auto res = minimize(sys, cfg, rng);
  CHECK(res.converged);
  CHECK(res.hard_loss < 1e-6);
  CHECK(res.final_loss <= res.initial_loss);
  CHECK(satisfies_kb(sys.to_model(res.params), kb).satisfied);
}

TEST_CASE("KB without statements converges at once") {
  auto kb = parse_kb("term a.\nterm b.\npred P.\n");
  SolveConfig cfg;
  cfg.max_iters = 200;
  const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
  Random rng(0);
  const auto res = minimize(sys, cfg, rng);
  CHECK(res.converged);
  CHECK(res.hard_loss == 0.0);
  CHECK(res.final_loss < 0.05);
}

TEST_CASE("contradiction does not converge") {
  auto kb = parse_kb("P(a, b).\nnot P(a, b).\n");
  SolveConfig cfg;
  cfg.max_iters = 1000;
  const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
  Random rng(0);
  const auto res = minimize(sys, cfg, rng);
  CHECK_FALSE(res.converged);
  CHECK_FALSE(res.diagnostics.empty());
}

TEST_CASE("best iterate never exceeds the start") {
  Random gen(12);
  for (int trial = 0; trial < 5; ++trial) {
    auto kb = testing::random_kb(gen, 4, 2, 4, 1);
    SolveConfig cfg;
    cfg.max_iters = 300;
    const auto sys = build_system(kb, jaccard_similarity(kb), cfg);
    Random rng(static_cast<std::uint64_t>(trial));
    const auto res = minimize(sys, cfg, rng);
    CHECK(res.final_loss <= res.initial_loss);
  }
}

TEST_CASE("ensembles") {
  auto mp = parse_kb("P(a, A).\nforall x: P(x, A) => Q(x, B).\n");
  const auto sim = jaccard_similarity(mp);
  SolveConfig cfg;

  const auto one = generate_ensemble(parse_kb("P(a, b)."), jaccard_similarity(parse_kb("P(a, b).")), cfg, 1);
  CHECK(one.size() == 1);
  CHECK(one.status == EnsembleStatus::Complete);

  const std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  const auto five = generate_ensemble(mp, sim, cfg, 5, seeds);
  REQUIRE(five.size() == 5);
  for (const auto& m : five.models) {
    CHECK(satisfies_kb(m, mp).satisfied);
    CHECK(atom_truth(m, *mp.find_predicate("Q"), *mp.find_term("a"), *mp.find_term("B")));
  }
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) CHECK(mean_point_distance(five.models[i], five.models[j]) >= cfg.diversity_floor);
  }

  const std::vector<std::uint64_t> repeated{7, 7};
  const auto dup = generate_ensemble(mp, sim, cfg, 2, repeated);
  CHECK(dup.size() == 1);
  CHECK(dup.status == EnsembleStatus::Partial);
  REQUIRE(dup.attempts.size() == 2);
  CHECK(dup.attempts[1].reason.find("near-duplicate") != std::string::npos);

  const auto again = generate_ensemble(mp, sim, cfg, 5, seeds);
  for (std::size_t i = 0; i < 5; ++i) CHECK(again.models[i].points() == five.models[i].points());
}

TEST_CASE("contradictory KB yields a partial, empty ensemble") {
  auto kb = parse_kb("P(a, b).\nnot P(a, b).\n");
  SolveConfig cfg;
  cfg.max_iters = 300;
  cfg.restarts = 2;
  const auto e = generate_ensemble(kb, jaccard_similarity(kb), cfg, 2);
  CHECK(e.empty());
  CHECK(e.status == EnsembleStatus::Partial);
  CHECK(e.attempts.size() == 4);
  CHECK(e.attempts[0].reason.find("violates") != std::string::npos);
}

TEST_CASE("config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.step = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.loss_tol = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
