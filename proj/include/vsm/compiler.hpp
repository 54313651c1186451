// Compiles a knowledge base into a differentiable constraint system over a
// flat parameter vector [term points | predicate directions].
//
//   triple P(a,b)        (|r| - delta)_+^2        r = proj_P(x_b - x_a) - d_P
//   ground formula       (1 - v)_+^2              v: soft truth, see below
//   axiom instance       ground implication P(t,A) => Q(t,B)
//   similarity pair      (log SD)^2
//   gauge                |centroid|^2, (mean spread - 1)^2
//
// Soft truth of an atom is logistic(s * (center - |r|)). Negation is 1 - v,
// disjunction min(1, v + w), conjunction max(0, v + w - 1), and implication
// min(1, 1 - v + w). With 0/1 atom values these reduce to Boolean truth
// tables, which makes a zero hard loss equivalent to satisfaction.

#ifndef VSM_COMPILER_HPP
#define VSM_COMPILER_HPP

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vsm/geometry.hpp"
#include "vsm/logic.hpp"
#include "vsm/similarity.hpp"

namespace vsm {

/// Logistic step centred on delta: 0.5 at residual_norm == delta, tending to
/// the 0/1 step as sharpness grows.
template <typename Scalar>
Scalar soft_truth(Scalar residual_norm, Scalar delta, Scalar sharpness) {
  using std::exp;
  const Scalar z = sharpness * (delta - residual_norm);
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

struct LossWeights {
  double triple = 1.0;
  double axiom = 1.0;
  double similarity = 0.1;
  double gauge = 0.01;
};

struct CompileConfig {
  double delta = 0.1;
  /// 0 selects 10 / delta.
  double sharpness = 0.0;
  /// Fraction of delta by which targets are tightened: atoms that should
  /// hold aim for delta * (1 - margin), atoms that should fail for
  /// delta * (1 + margin).
  double margin = 0.0;
  LossWeights weights;
  DisparityOptions disparity;

  double effective_sharpness() const { return sharpness > 0.0 ? sharpness : 10.0 / delta; }
};

class ParameterLayout {
 public:
  ParameterLayout(Eigen::Index dimension, std::size_t num_terms, std::vector<std::vector<Eigen::Index>> pred_dims);

  Eigen::Index dimension() const noexcept { return dimension_; }
  std::size_t num_terms() const noexcept { return num_terms_; }
  std::size_t num_predicates() const noexcept { return pred_dims_.size(); }
  /// |terms| * N + sum of K_p.
  Eigen::Index size() const noexcept { return size_; }

  Eigen::Index term_offset(TermId t) const;
  Eigen::Index pred_offset(PredId p) const;
  std::span<const Eigen::Index> dims(PredId p) const { return pred_dims_.at(index(p)); }

  template <typename Derived>
  auto point(const Eigen::MatrixBase<Derived>& params, TermId t) const {
    return params.segment(term_offset(t), dimension_);
  }
  template <typename Derived>
  auto direction(const Eigen::MatrixBase<Derived>& params, PredId p) const {
    return params.segment(pred_offset(p), static_cast<Eigen::Index>(dims(p).size()));
  }

 private:
  Eigen::Index dimension_;
  std::size_t num_terms_;
  std::vector<std::vector<Eigen::Index>> pred_dims_;
  std::vector<Eigen::Index> pred_offsets_;
  Eigen::Index size_;
};

enum class LossKind { Triple, AxiomInstance, GroundFormula, SimilarityPair, GaugeCentroid, GaugeScale };

std::string_view to_string(LossKind k) noexcept;

struct TripleLoss {
  PredId pred;
  TermId head;
  TermId tail;
  double delta;  // hinge radius
};

struct SoftFormulaLoss {
  FormulaPtr formula;  // ground
  double delta;
  double sharpness;
  double margin;
};

struct SimilarityLoss {
  TermId first;
  TermId second;
  double similarity;
  DisparityOptions disparity;
};

struct GaugeLoss {};

/// Step semantics (hard) or logistic semantics (soft) for atom truth.
enum class Semantics { Soft, Hard };

struct LossTerm {
  LossKind kind;
  double weight;
  std::variant<TripleLoss, SoftFormulaLoss, SimilarityLoss, GaugeLoss> payload;
  std::string label;

  /// Unweighted loss value, always >= 0.
  double value(const ParameterLayout& layout, const Eigen::VectorXd& params) const;
  /// Adds scale * d(value)/d(params) into `grad` and returns the value.
  /// A positive `sharpness_override` replaces the stored sharpness.
  double accumulate(const ParameterLayout& layout, const Eigen::VectorXd& params, Eigen::VectorXd* grad,
                    double scale, double sharpness_override = 0.0) const;
  /// Value under 0/1 atom truth at radius `delta` (logic terms only; 0 otherwise).
  double hard_value(const ParameterLayout& layout, const Eigen::VectorXd& params, double delta) const;
  /// Soft truth value of a formula term; throws for other payloads.
  double soft_value(const ParameterLayout& layout, const Eigen::VectorXd& params) const;
};

class ConstraintSystem {
 public:
  ConstraintSystem(ParameterLayout layout, std::vector<LossTerm> losses, CompileConfig config);

  const ParameterLayout& layout() const noexcept { return layout_; }
  std::span<const LossTerm> losses() const noexcept { return losses_; }
  const CompileConfig& config() const noexcept { return config_; }
  std::size_t count(LossKind k) const;

  /// Sum of weight * loss.
  double total_loss(const Eigen::VectorXd& params) const;
  /// Same, writing the gradient into `grad` (resized as needed).
  double total_loss(const Eigen::VectorXd& params, Eigen::VectorXd& grad, double sharpness_override = 0.0) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;

  /// Unweighted triple + axiom + formula loss under step semantics at the
  /// configured delta. Zero exactly when the model satisfies the KB.
  double hard_loss(const Eigen::VectorXd& params) const;

  /// Directions are normalized on the way out.
  VectorModel to_model(const Eigen::VectorXd& params, TruthMode mode = TruthMode::Approximate) const;
  Eigen::VectorXd to_params(const VectorModel& m) const;

 private:
  ParameterLayout layout_;
  std::vector<LossTerm> losses_;
  CompileConfig config_;
};

LossTerm compile_triple(const Triple& t, double delta, const ParameterLayout& layout);
/// `f` must be Implies(Atom, Atom) with ground arguments.
LossTerm compile_ground_implication(const FormulaPtr& f, double delta, double sharpness, const ParameterLayout& layout,
                                    double margin = 0.0);
/// Top-level conjunctions split into one term per conjunct; a bare atom
/// compiles like a triple.
std::vector<LossTerm> compile_ground_formula(const FormulaPtr& f, double delta, double sharpness,
                                             const ParameterLayout& layout, double margin = 0.0);
std::vector<LossTerm> compile_axiom(const Axiom& ax, const KnowledgeBase& kb, double delta, double sharpness,
                                    const ParameterLayout& layout, double margin = 0.0);
/// One term per unordered distinct pair; their mean equals disparity_score.
std::vector<LossTerm> compile_similarity(const SimilarityMatrix& s, const ParameterLayout& layout,
                                         const DisparityOptions& opts = {});
/// Centroid and spread terms pinning translation and global scale.
std::vector<LossTerm> compile_gauge(const ParameterLayout& layout, const KnowledgeBase& kb);

/// `pred_dims[p]` is the axis subset for predicate p. Terms whose weight is
/// zero are left out.
ConstraintSystem compile_kb(const KnowledgeBase& kb, const SimilarityMatrix& s, const CompileConfig& config,
                            Eigen::Index dimension, std::vector<std::vector<Eigen::Index>> pred_dims);

}  // namespace vsm

#endif  // VSM_COMPILER_HPP
