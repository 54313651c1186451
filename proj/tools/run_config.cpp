#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace vsm::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "off") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("bad number for '" + std::string(key) + "': " + std::string(v));
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("bad integer for '" + std::string(key) + "': " + std::string(v));
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for '" + std::string(key) + "': " + std::string(v));
}

}  // namespace

void apply_setting(SolveConfig& c, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (key == "dimension" || key == "dim") c.dimension = to_int<Eigen::Index>(key, v);
  else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "sharpness") c.sharpness = to_double(key, v);
  else if (key == "sharpness_start") c.sharpness_start = to_double(key, v);
  else if (key == "anneal_fraction") c.anneal_fraction = to_double(key, v);
  else if (key == "margin") c.margin = to_double(key, v);
  else if (key == "w_triple") c.weights.triple = to_double(key, v);
  else if (key == "w_axiom") c.weights.axiom = to_double(key, v);
  else if (key == "w_sim" || key == "sim_weight") c.weights.similarity = to_double(key, v);
  else if (key == "w_gauge") c.weights.gauge = to_double(key, v);
  else if (key == "max_iters" || key == "iters") c.max_iters = to_int<int>(key, v);
  else if (key == "step") c.step = to_double(key, v);
  else if (key == "decay") c.decay = to_double(key, v);
  else if (key == "max_step_norm") c.max_step_norm = to_double(key, v);
  else if (key == "grad_tol") c.grad_tol = to_double(key, v);
  else if (key == "seed") c.seed = to_int<std::uint64_t>(key, v);
  else if (key == "restarts") c.restarts = to_int<int>(key, v);
  else if (key == "ensemble" || key == "ensemble_size") c.ensemble_size = to_int<std::size_t>(key, v);
  else if (key == "subspace") {
    try {
      c.subspace = SubspacePolicy::parse(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "loss_tol") c.loss_tol = to_double(key, v);
  else if (key == "require_satisfies_kb") c.require_satisfies_kb = to_bool(key, v);
  else if (key == "pref_threshold" || key == "preference_threshold") c.preference_threshold = to_double(key, v);
  else if (key == "pref_mode") {
    if (v == "mean") c.preference_mode = PreferenceMode::MeanDisparity;
    else if (v == "per_pair") c.preference_mode = PreferenceMode::PerPair;
    else throw ConfigError("pref_mode must be 'mean' or 'per_pair'");
  } else if (key == "diversity_floor") c.diversity_floor = to_double(key, v);
  else if (key == "sim_resolution") c.sim_resolution = to_double(key, v);
  else if (key == "eps_sd") c.eps_sd = to_double(key, v);
  else if (key == "diagnostics_every") c.diagnostics_every = to_int<int>(key, v);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(SolveConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    try {
      apply_setting(config, trim(l.substr(0, eq)), l.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

nlohmann::ordered_json config_to_json(const SolveConfig& c) {
  auto num = [](double x) -> nlohmann::ordered_json {
    if (std::isinf(x)) return "inf";
    return x;
  };
  nlohmann::ordered_json j;
  j["dimension"] = c.dimension;
  j["delta"] = c.delta;
  j["sharpness"] = c.sharpness;
  j["sharpness_start"] = c.sharpness_start;
  j["anneal_fraction"] = c.anneal_fraction;
  j["margin"] = c.margin;
  j["w_triple"] = c.weights.triple;
  j["w_axiom"] = c.weights.axiom;
  j["w_sim"] = c.weights.similarity;
  j["w_gauge"] = c.weights.gauge;
  j["max_iters"] = c.max_iters;
  j["step"] = c.step;
  j["decay"] = c.decay;
  j["max_step_norm"] = c.max_step_norm;
  j["grad_tol"] = c.grad_tol;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["ensemble"] = c.ensemble_size;
  j["subspace"] = c.subspace.str();
  j["loss_tol"] = c.loss_tol;
  j["require_satisfies_kb"] = c.require_satisfies_kb;
  j["pref_threshold"] = num(c.preference_threshold);
  j["pref_mode"] = c.preference_mode == PreferenceMode::MeanDisparity ? "mean" : "per_pair";
  j["diversity_floor"] = c.diversity_floor;
  j["sim_resolution"] = c.sim_resolution;
  j["eps_sd"] = c.eps_sd;
  j["diagnostics_every"] = c.diagnostics_every;
  return j;
}

}  // namespace vsm::cli
