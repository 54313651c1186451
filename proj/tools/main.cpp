// vsm: validate, solve, score, query, compare.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

struct SolverFlags {
  std::optional<long> dim;
  std::optional<double> delta;
  std::optional<std::size_t> ensemble;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<double> sim_weight;
  std::optional<std::string> pref_threshold;
  std::optional<std::string> config;

  void add_to(CLI::App* app) {
    app->add_option("--dim", dim, "embedding dimension N");
    app->add_option("--delta", delta, "approximation radius");
    app->add_option("--ensemble", ensemble, "ensemble size E");
    app->add_option("--seed", seed, "first seed");
    app->add_option("--iters", iters, "iterations per run");
    app->add_option("--sim-weight", sim_weight, "similarity loss weight");
    app->add_option("--pref-threshold", pref_threshold, "preference threshold ('inf' disables)");
    app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
  }

  // config file first, then flags
  vsm::SolveConfig resolve() const {
    vsm::SolveConfig c;
    if (config) vsm::cli::apply_config_text(c, vsm::cli::read_file(*config));
    if (dim) c.dimension = *dim;
    if (delta) c.delta = *delta;
    if (ensemble) c.ensemble_size = *ensemble;
    if (seed) c.seed = *seed;
    if (iters) c.max_iters = *iters;
    if (sim_weight) c.weights.similarity = *sim_weight;
    if (pref_threshold) vsm::cli::apply_setting(c, "pref_threshold", *pref_threshold);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = vsm::cli;
  CLI::App app{"Vector-space models for first-order knowledge bases"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);
  bool json = false;
  app.add_flag("--json", json, "structured output")->configurable(false);

  std::string kb;
  auto* validate = app.add_subcommand("validate", "parse and check a knowledge base");
  validate->add_option("kb", kb, "knowledge base file")->required();
  validate->add_flag("--json", json, "structured output");

  SolverFlags solve_flags;
  std::string out_dir = "ensemble";
  std::string sim;
  auto* solve = app.add_subcommand("solve", "generate an ensemble of models");
  solve->add_option("kb", kb, "knowledge base file")->required();
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--sim", sim, "similarity matrix file")->check(CLI::ExistingFile);
  solve->add_flag("--json", json, "structured output");
  solve_flags.add_to(solve);

  std::string ensemble_dir, query_text;
  bool do_explain = false;
  auto* query = app.add_subcommand("query", "answer a query over an ensemble");
  query->add_option("ensemble_dir", ensemble_dir, "solve output directory")->required();
  query->add_option("kb", kb, "knowledge base file")->required();
  query->add_option("query", query_text, "query name or formula")->required();
  query->add_flag("--explain", do_explain, "per-model breakdown");
  query->add_flag("--json", json, "structured output");

  std::string queries_path, report_path;
  auto* compare = app.add_subcommand("compare", "check ensemble verdicts against the finite-domain oracle");
  compare->add_option("ensemble_dir", ensemble_dir, "solve output directory")->required();
  compare->add_option("kb", kb, "knowledge base file")->required();
  compare->add_option("queries", queries_path, "file of query statements")->required();
  compare->add_option("--out", report_path, "also write the report here");
  compare->add_flag("--json", json, "structured output");

  std::string model_path;
  SolverFlags score_flags;
  auto* score = app.add_subcommand("score", "disparity and satisfaction of one model");
  score->add_option("model", model_path, "model file")->required();
  score->add_option("kb", kb, "knowledge base file")->required();
  score->add_option("--sim", sim, "similarity matrix file");
  score->add_flag("--json", json, "structured output");
  score_flags.add_to(score);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_code::input_error;
  }

  try {
    if (*validate) return cli::cmd_validate(kb, json, std::cout, std::cerr);
    if (*solve) {
      cli::SolveRequest req{kb, out_dir, std::nullopt, solve_flags.config, solve_flags.resolve()};
      if (!sim.empty()) req.sim_path = sim;
      return cli::cmd_solve(req, json, std::cout, std::cerr);
    }
    if (*query) return cli::cmd_query({ensemble_dir, kb, query_text, do_explain}, json, std::cout, std::cerr);
    if (*compare) {
      cli::CompareRequest req{ensemble_dir, kb, queries_path, std::nullopt};
      if (!report_path.empty()) req.report_path = report_path;
      return cli::cmd_compare(req, json, std::cout, std::cerr);
    }
    if (*score) {
      cli::ScoreRequest req{model_path, kb, std::nullopt, score_flags.resolve()};
      if (!sim.empty()) req.sim_path = sim;
      return cli::cmd_score(req, json, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code::input_error;
  }
  return cli::exit_code::input_error;
}
