// Model generation: subspace choice, initialization, gradient descent with
// step decay and direction retraction, and ensemble assembly.

#ifndef VSM_SOLVER_HPP
#define VSM_SOLVER_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/compiler.hpp"
#include "vsm/ensemble.hpp"
#include "vsm/logic.hpp"
#include "vsm/similarity.hpp"

namespace vsm {

/// How many axes each predicate gets.
struct SubspacePolicy {
  enum class Kind { Half, Full, Fixed };
  Kind kind = Kind::Half;
  Eigen::Index k = 0;  // used by Fixed

  Eigen::Index axes(Eigen::Index n) const;
  static SubspacePolicy parse(std::string_view text);  // "half", "full" or an integer
  std::string str() const;
};

struct SolveConfig {
  Eigen::Index dimension = 8;
  double delta = 0.1;
  /// Final logistic sharpness; 0 selects 10 / delta.
  double sharpness = 0.0;
  /// Starting sharpness for the annealing schedule.
  double sharpness_start = 2.0;
  /// Fraction of max_iters over which sharpness rises geometrically.
  double anneal_fraction = 0.6;
  double margin = 0.5;
  LossWeights weights;
  int max_iters = 5000;
  double step = 0.05;
  double decay = 0.999;
  /// Longest allowed parameter update per iteration.
  double max_step_norm = 1.0;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0;
  /// Extra attempts allowed beyond the requested ensemble size.
  int restarts = 20;
  std::size_t ensemble_size = 7;
  SubspacePolicy subspace;

  // acceptance
  double loss_tol = 1e-6;
  bool require_satisfies_kb = true;
  double preference_threshold = 0.5;  // +inf disables the preference filter
  PreferenceMode preference_mode = PreferenceMode::MeanDisparity;
  double diversity_floor = 0.05;
  /// Similarity resolution as a fraction of delta.
  double sim_resolution = 0.5;
  double eps_sd = 1e-6;

  int diagnostics_every = 100;

  CompileConfig compile_config() const;
  DisparityOptions disparity() const;
  void validate() const;
};

/// Deterministic axis subset for a predicate name (stable hash).
std::vector<Eigen::Index> choose_subspace(std::string_view predicate, Eigen::Index n, const SubspacePolicy& policy);

/// Portable generator wrapper: mt19937_64 bits with fixed transforms.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi);
  double gaussian();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Points uniform in [-1, 1]^N, directions uniform on the unit K-sphere.
Eigen::VectorXd init_params(const ParameterLayout& layout, Random& rng);

struct TraceRecord {
  std::uint64_t seed;
  int iteration;
  double loss;
  double sharpness;
};

struct MinimizeResult {
  Eigen::VectorXd params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double hard_loss = 0.0;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  std::string diagnostics;
  std::vector<TraceRecord> trace;
};

/// Gradient descent from a random start. The returned iterate is the best
/// one seen at the final sharpness, compared against the starting point
/// evaluated the same way.
MinimizeResult minimize(const ConstraintSystem& system, const SolveConfig& config, Random& rng,
                        std::uint64_t seed_tag = 0);

/// Builds the constraint system the solver uses for a KB.
ConstraintSystem build_system(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config);

/// Mean over terms of the distance between corresponding points.
double mean_point_distance(const VectorModel& a, const VectorModel& b);

/// Draws seeds config.seed, config.seed + 1, ... until `count` models are
/// accepted or count + restarts attempts are spent.
Ensemble generate_ensemble(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config,
                           std::size_t count, std::vector<TraceRecord>* trace = nullptr);

/// Same, with an explicit seed sequence.
Ensemble generate_ensemble(const KnowledgeBase& kb, const SimilarityMatrix& s, const SolveConfig& config,
                           std::size_t count, std::span<const std::uint64_t> seeds,
                           std::vector<TraceRecord>* trace = nullptr);

}  // namespace vsm

#endif  // VSM_SOLVER_HPP
