// Term similarity and the preferred-model score.
//
// SD(i, j) = (1 - S(i, j)) / D(i, j) compares dissimilarity with distance;
// a model whose geometry tracks similarity has SD close to 1 for every pair.
// The disparity score is the mean of (log SD)^2 over unordered pairs.

#ifndef VSM_SIMILARITY_HPP
#define VSM_SIMILARITY_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/geometry.hpp"
#include "vsm/logic.hpp"

namespace vsm {

/// Symmetric, unit diagonal, entries in [0, 1]; indexed in KB term order.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::vector<std::string> terms, Eigen::MatrixXd values);

  std::size_t size() const noexcept { return terms_.size(); }
  std::span<const std::string> terms() const noexcept { return terms_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(TermId a, TermId b) const {
    return values_(static_cast<Eigen::Index>(index(a)), static_cast<Eigen::Index>(index(b)));
  }

 private:
  std::vector<std::string> terms_;
  Eigen::MatrixXd values_;
};

/// Jaccard overlap of the (predicate, role, other-term) features each term
/// takes part in. Two featureless distinct terms score 0.
SimilarityMatrix jaccard_similarity(const KnowledgeBase& kb);

/// Header row of term names, then one numeric row per term (comma or
/// whitespace separated). Reordered into `kb`'s term order.
SimilarityMatrix read_similarity_matrix(std::string_view text, const KnowledgeBase& kb);
std::string write_similarity_matrix(const SimilarityMatrix& s);

struct DisparityOptions {
  /// SD is clamped into [eps_sd, 1/eps_sd] before taking logs.
  double eps_sd = 1e-6;
  /// Distances and dissimilarities below this are treated as equal to it.
  /// Zero gives the raw ratio with the degenerate-case rules below.
  double resolution = 0.0;
};

/// Raw (1 - S) / D. D = 0 with S < 1 gives +infinity; S = 1 with D > 0
/// gives 0; S = 1 with D = 0 (co-located synonyms) gives nullopt.
std::optional<double> sd_ratio(const SimilarityMatrix& s, const VectorModel& m, TermId a, TermId b);

/// (log SD)^2 for one pair after resolution and clamping; 0 for co-located
/// synonyms.
double pair_disparity(double similarity, double distance, const DisparityOptions& opts = {});

/// Mean pair_disparity over unordered distinct pairs. Fewer than two terms
/// score 0.
double disparity_score(const SimilarityMatrix& s, const VectorModel& m, const DisparityOptions& opts = {});

enum class PreferenceMode {
  MeanDisparity,  // disparity_score < threshold
  PerPair,        // every pair_disparity < threshold
};

bool is_preferred(const SimilarityMatrix& s, const VectorModel& m, double threshold,
                  const DisparityOptions& opts = {}, PreferenceMode mode = PreferenceMode::MeanDisparity);

}  // namespace vsm

#endif  // VSM_SIMILARITY_HPP
