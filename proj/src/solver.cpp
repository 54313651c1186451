#include "vsm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vsm {

Eigen::Index SubspacePolicy::axes(Eigen::Index n) const {
  switch (kind) {
    case Kind::Half: return std::max<Eigen::Index>(1, n / 2);
    case Kind::Full: return n;
    case Kind::Fixed: return k;
  }
  return n;
}

SubspacePolicy SubspacePolicy::parse(std::string_view text) {
  if (text == "half") return {Kind::Half, 0};
  if (text == "full") return {Kind::Full, 0};
  std::size_t used = 0;
  const std::string s(text);
  long k = 0;
  try {
    k = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || k < 1) throw std::invalid_argument("subspace policy must be 'half', 'full' or a positive integer");
  return {Kind::Fixed, static_cast<Eigen::Index>(k)};
}

std::string SubspacePolicy::str() const {
  switch (kind) {
    case Kind::Half: return "half";
    case Kind::Full: return "full";
    case Kind::Fixed: return std::to_string(k);
  }
  return "half";
}

CompileConfig SolveConfig::compile_config() const {
  CompileConfig c;
  c.delta = delta;
  c.sharpness = sharpness;
  c.margin = margin;
  c.weights = weights;
  c.disparity = disparity();
  return c;
}

DisparityOptions SolveConfig::disparity() const { return DisparityOptions{eps_sd, sim_resolution * delta}; }

void SolveConfig::validate() const {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("decay must lie in (0, 1]");
  if (!(loss_tol >= 0.0)) throw std::invalid_argument("loss_tol must be non-negative");
  if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("margin must lie in [0, 1)");
  if (!(preference_threshold > 0.0)) throw std::invalid_argument("preference threshold must be positive");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (restarts < 0) throw std::invalid_argument("restarts must be non-negative");
  const Eigen::Index k = subspace.axes(dimension);
  if (k < 1 || k > dimension) throw std::invalid_argument("subspace size K must satisfy 1 <= K <= N");
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void normalize_directions(const ParameterLayout& layout, Eigen::VectorXd& params) {
  for (std::size_t p = 0; p < layout.num_predicates(); ++p) {
    auto dir = params.segment(layout.pred_offset(pred_id(p)), static_cast<Eigen::Index>(layout.dims(pred_id(p)).size()));
    const double norm = dir.norm();
    if (norm > 0.0) dir /= norm;
  }
}

}  // namespace

std::vector<Eigen::Index> choose_subspace(std::string_view predicate, Eigen::Index n, const SubspacePolicy& policy) {
  const Eigen::Index k = policy.axes(n);
  if (k < 1 || k > n) throw std::invalid_argument("subspace size K must satisfy 1 <= K <= N");
  std::vector<Eigen::Index> axes(static_cast<std::size_t>(n));
  std::iota(axes.begin(), axes.end(), Eigen::Index{0});
  std::uint64_t state = fnv1a(predicate);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto remaining = static_cast<std::uint64_t>(n - i);
    const auto j = i + static_cast<Eigen::Index>(splitmix64(state) % remaining);
    std::swap(axes[static_cast<std::size_t>(i)], axes[static_cast<std::size_t>(j)]);
  }
  axes.resize(static_cast<std::size_t>(k));
  std::sort(axes.begin(), axes.end());
  return axes;
}

double Random::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double Random::gaussian() {
  const double u1 = 1.0 - uniform(0.0, 1.0);  // (0, 1]
  const double u2 = uniform(0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd init_params(const ParameterLayout& layout, Random& rng) {
  Eigen::VectorXd params(layout.size());
  const Eigen::Index point_block = layout.dimension() * static_cast<Eigen::Index>(layout.num_terms());
  for (Eigen::Index i = 0; i < point_block; ++i) params[i] = rng.uniform(-1.0, 1.0);
  for (std::size_t p = 0; p < layout.num_predicates(); ++p) {
    auto dir = layout.direction(params, pred_id(p));
    Eigen::VectorXd g(dir.size());
    do {
      for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.gaussian();
    } while (g.norm() < 1e-12);
    params.segment(layout.pred_offset(pred_id(p)), g.size()) = g / g.norm();
  }
  return params;
}

namespace {

// Soft terms (similarity, gauge) can hold a point a hair outside a tight
// hinge. When that happens, descend on the constraint terms alone from the
// best iterate and keep the result only if it lowers the hard loss.
void polish(const ConstraintSystem& system, const SolveConfig& config, double sharpness, MinimizeResult& out) {
  std::vector<LossTerm> hard;
  for (const auto& l : system.losses()) {
    if (l.kind == LossKind::Triple || l.kind == LossKind::AxiomInstance || l.kind == LossKind::GroundFormula) {
      hard.push_back(l);
    }
  }
  if (hard.empty()) return;
  const ConstraintSystem constraints(system.layout(), std::move(hard), system.config());
  Eigen::VectorXd params = out.params;
  Eigen::VectorXd grad(params.size());
  double best_hard = out.hard_loss;
  for (int k = 1; k <= config.max_iters; ++k) {
    constraints.total_loss(params, grad, sharpness);
    if (!grad.allFinite() || grad.norm() < config.grad_tol) break;
    Eigen::VectorXd update = config.step * grad;
    const double update_norm = update.norm();
    if (update_norm > config.max_step_norm) update *= config.max_step_norm / update_norm;
    params -= update;
    normalize_directions(system.layout(), params);
    if (k % 25 == 0 || k == config.max_iters) {
      const double h = system.hard_loss(params);
      if (h < best_hard) {
        best_hard = h;
        out.params = params;
        out.hard_loss = h;
        out.final_loss = system.total_loss(params);
      }
      if (h < config.loss_tol) break;
    }
  }
}

}  // namespace

MinimizeResult minimize(const ConstraintSystem& system, const SolveConfig& config, Random& rng,
                        std::uint64_t seed_tag) {
  const auto& layout = system.layout();
  MinimizeResult out;
  Eigen::VectorXd params = init_params(layout, rng);
  Eigen::VectorXd grad(params.size());

  const double s_final = system.config().effective_sharpness();
  const double s_start = std::min(config.sharpness_start, s_final);
  const int anneal_iters = static_cast<int>(std::lround(config.anneal_fraction * config.max_iters));
  auto sharpness_at = [&](int k) {
    if (anneal_iters <= 0 || k >= anneal_iters || s_start >= s_final) return s_final;
    return s_start * std::pow(s_final / s_start, static_cast<double>(k) / anneal_iters);
  };

  out.initial_loss = system.total_loss(params, grad, s_final);
  Eigen::VectorXd best = params;
  double best_loss = out.initial_loss;
  double step = config.step;
  int k = 0;
  for (; k < config.max_iters; ++k) {
    const double s = sharpness_at(k);
    const double loss = system.total_loss(params, grad, s);
    if (!std::isfinite(loss) || !grad.allFinite()) {
      out.diverged = true;
      std::ostringstream msg;
      msg << "non-finite loss or gradient at iteration " << k;
      out.diagnostics = msg.str();
      break;
    }
    if (config.diagnostics_every > 0 && k % config.diagnostics_every == 0) {
      out.trace.push_back({seed_tag, k, loss, s});
    }
    const bool settled = s == s_final;
    if (settled && loss < best_loss) {
      best_loss = loss;
      best = params;
    }
    if (settled && grad.norm() < config.grad_tol) break;
    Eigen::VectorXd update = step * grad;
    const double update_norm = update.norm();
    if (update_norm > config.max_step_norm) update *= config.max_step_norm / update_norm;
    params -= update;
    normalize_directions(layout, params);
    step *= config.decay;
  }
  out.iterations = k;
  if (!out.diverged) {
    const double last = system.total_loss(params, grad, s_final);
    if (std::isfinite(last) && last < best_loss) {
      best_loss = last;
      best = params;
    }
  }
  out.params = std::move(best);
  out.final_loss = best_loss;
  out.hard_loss = system.hard_loss(out.params);
  if (!out.diverged && out.hard_loss >= config.loss_tol) polish(system, config, s_final, out);
  out.converged = !out.diverged && out.hard_loss < config.loss_tol;
  if (!out.diverged && !out.converged) {
    std::ostringstream msg;
    msg << "hard constraint loss " << out.hard_loss << " above tolerance " << config.loss_tol;
    out.diagnostics = msg.str();
  }
  return out;
}

ConstraintSystem build_system(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config) {
  config.validate();
  std::vector<std::vector<Eigen::Index>> dims;
  for (std::size_t p = 0; p < kb.num_predicates(); ++p) {
    dims.push_back(choose_subspace(kb.name(pred_id(p)), config.dimension, config.subspace));
  }
  return compile_kb(kb, s, config.compile_config(), config.dimension, std::move(dims));
}

double mean_point_distance(const VectorModel& a, const VectorModel& b) {
  if (a.num_terms() != b.num_terms() || a.dimension() != b.dimension()) {
    throw std::invalid_argument("models are not comparable");
  }
  if (a.num_terms() == 0) return 0.0;
  return (a.points() - b.points()).colwise().norm().mean();
}

Ensemble generate_ensemble(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config,
                           std::size_t count, std::vector<TraceRecord>* trace) {
  std::vector<std::uint64_t> seeds(count + static_cast<std::size_t>(config.restarts));
  std::iota(seeds.begin(), seeds.end(), config.seed);
  return generate_ensemble(kb, s, config, count, seeds, trace);
}

Ensemble generate_ensemble(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config,
                           std::size_t count, std::span<const std::uint64_t> seeds, std::vector<TraceRecord>* trace) {
  if (count < 1) throw std::invalid_argument("ensemble size must be at least 1");
  const ConstraintSystem system = build_system(kb, s, config);
  const DisparityOptions disparity = config.disparity();
  const bool filter_preference = std::isfinite(config.preference_threshold);

  Ensemble ensemble;
  ensemble.requested = count;
  for (std::uint64_t seed : seeds) {
    if (ensemble.size() >= count) break;
    Random rng(seed);
    MinimizeResult res = minimize(system, config, rng, seed);
    if (trace) trace->insert(trace->end(), res.trace.begin(), res.trace.end());

    Attempt attempt{seed, false, {}};
    if (res.diverged) {
      attempt.reason = "diverged: " + res.diagnostics;
      ensemble.attempts.push_back(attempt);
      continue;
    }
    VectorModel model = system.to_model(res.params);
    if (!res.converged) {
      attempt.reason = "not converged: " + res.diagnostics;
      const auto report = satisfies_kb(model, kb);
      for (const auto& v : report.violations) attempt.reason += "; violates " + v.description;
      ensemble.attempts.push_back(attempt);
      continue;
    }
    if (config.require_satisfies_kb) {
      const auto report = satisfies_kb(model, kb);
      if (!report.satisfied) {
        attempt.reason = "violates " + report.violations.front().description;
        ensemble.attempts.push_back(attempt);
        continue;
      }
    }
    const double score = disparity_score(s, model, disparity);
    if (filter_preference && !is_preferred(s, model, config.preference_threshold, disparity, config.preference_mode)) {
      std::ostringstream msg;
      msg << "not preferred (disparity " << score << ")";
      attempt.reason = msg.str();
      ensemble.attempts.push_back(attempt);
      continue;
    }
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      if (mean_point_distance(model, ensemble.models[i]) < config.diversity_floor) {
        attempt.reason = "near-duplicate of member " + std::to_string(i);
        break;
      }
    }
    if (!attempt.reason.empty()) {
      ensemble.attempts.push_back(attempt);
      continue;
    }
    attempt.accepted = true;
    ensemble.attempts.push_back(attempt);
    ensemble.add(std::move(model), Provenance{seed, res.final_loss, res.hard_loss, score, res.iterations});
  }
  ensemble.status = ensemble.size() >= count ? EnsembleStatus::Complete : EnsembleStatus::Partial;
  return ensemble;
}

}  // namespace vsm
