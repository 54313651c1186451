#include "vsm/compiler.hpp"

#include <algorithm>
#include <stdexcept>

namespace vsm {

std::string_view to_string(LossKind k) noexcept {
  switch (k) {
    case LossKind::Triple: return "triple";
    case LossKind::AxiomInstance: return "axiom-instance";
    case LossKind::GroundFormula: return "ground-formula";
    case LossKind::SimilarityPair: return "similarity-pair";
    case LossKind::GaugeCentroid: return "gauge-centroid";
    case LossKind::GaugeScale: return "gauge-scale";
  }
  return "?";
}

ParameterLayout::ParameterLayout(Eigen::Index dimension, std::size_t num_terms,
                                 std::vector<std::vector<Eigen::Index>> pred_dims)
    : dimension_(dimension), num_terms_(num_terms), pred_dims_(std::move(pred_dims)) {
  if (dimension_ < 1) throw std::invalid_argument("dimension must be positive");
  Eigen::Index offset = dimension_ * static_cast<Eigen::Index>(num_terms_);
  for (const auto& dims : pred_dims_) {
    if (dims.empty() || static_cast<Eigen::Index>(dims.size()) > dimension_) {
      throw std::invalid_argument("predicate subspace must have 1 <= K <= N axes");
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] < 0 || dims[i] >= dimension_ || (i > 0 && dims[i] <= dims[i - 1])) {
        throw std::invalid_argument("predicate axes must be strictly increasing and inside [0, N)");
      }
    }
    pred_offsets_.push_back(offset);
    offset += static_cast<Eigen::Index>(dims.size());
  }
  size_ = offset;
}

Eigen::Index ParameterLayout::term_offset(TermId t) const {
  if (index(t) >= num_terms_) throw std::out_of_range("term outside the parameter layout");
  return static_cast<Eigen::Index>(index(t)) * dimension_;
}

Eigen::Index ParameterLayout::pred_offset(PredId p) const {
  if (index(p) >= pred_offsets_.size()) throw std::out_of_range("predicate outside the parameter layout");
  return pred_offsets_[index(p)];
}

namespace {

Eigen::VectorXd residual(const ParameterLayout& layout, const Eigen::VectorXd& params, PredId p, TermId head,
                         TermId tail) {
  return project_difference(layout.point(params, head), layout.point(params, tail), layout.dims(p)) -
         layout.direction(params, p);
}

// Adds d(loss)/d(params) given d(loss)/d(residual).
void scatter_residual_gradient(const ParameterLayout& layout, PredId p, TermId head, TermId tail,
                               const Eigen::VectorXd& d_residual, Eigen::VectorXd& grad) {
  const auto dims = layout.dims(p);
  const Eigen::Index h = layout.term_offset(head);
  const Eigen::Index t = layout.term_offset(tail);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const double g = d_residual[static_cast<Eigen::Index>(k)];
    grad[t + dims[k]] += g;
    grad[h + dims[k]] -= g;
  }
  grad.segment(layout.pred_offset(p), static_cast<Eigen::Index>(dims.size())) -= d_residual;
}

// Soft/hard truth of a ground formula with polarity-dependent atom centres.
struct FormulaEvaluator {
  const ParameterLayout& layout;
  const Eigen::VectorXd& params;
  double delta;
  double sharpness;
  double margin;
  Semantics semantics;

  double center(bool positive) const { return positive ? delta * (1.0 - margin) : delta * (1.0 + margin); }

  double value(const Formula& f, bool positive) const {
    switch (f.kind) {
      case FormulaKind::Atom: {
        if (f.head.is_variable() || f.tail.is_variable()) throw std::invalid_argument("formula is not ground");
        const double rho = residual(layout, params, f.pred, f.head.term, f.tail.term).norm();
        if (semantics == Semantics::Hard) return rho < delta ? 1.0 : 0.0;
        return soft_truth(rho, center(positive), sharpness);
      }
      case FormulaKind::Not:
        return 1.0 - value(*f.left, !positive);
      case FormulaKind::Or:
        return std::min(1.0, value(*f.left, positive) + value(*f.right, positive));
      case FormulaKind::And:
        return std::max(0.0, value(*f.left, positive) + value(*f.right, positive) - 1.0);
      case FormulaKind::Implies:
        return std::min(1.0, 1.0 - value(*f.left, !positive) + value(*f.right, positive));
      case FormulaKind::Forall:
      case FormulaKind::Exists:
        throw std::invalid_argument("quantifiers cannot be compiled as ground constraints");
    }
    return 0.0;
  }

  void backprop(const Formula& f, bool positive, double upstream, Eigen::VectorXd& grad) const {
    if (upstream == 0.0) return;
    switch (f.kind) {
      case FormulaKind::Atom: {
        const Eigen::VectorXd r = residual(layout, params, f.pred, f.head.term, f.tail.term);
        const double rho = r.norm();
        if (rho <= 0.0) return;
        const double s = soft_truth(rho, center(positive), sharpness);
        const double d_rho = -sharpness * s * (1.0 - s);
        scatter_residual_gradient(layout, f.pred, f.head.term, f.tail.term, (upstream * d_rho / rho) * r, grad);
        return;
      }
      case FormulaKind::Not:
        backprop(*f.left, !positive, -upstream, grad);
        return;
      case FormulaKind::Or:
        if (value(*f.left, positive) + value(*f.right, positive) < 1.0) {
          backprop(*f.left, positive, upstream, grad);
          backprop(*f.right, positive, upstream, grad);
        }
        return;
      case FormulaKind::And:
        if (value(*f.left, positive) + value(*f.right, positive) > 1.0) {
          backprop(*f.left, positive, upstream, grad);
          backprop(*f.right, positive, upstream, grad);
        }
        return;
      case FormulaKind::Implies:
        if (1.0 - value(*f.left, !positive) + value(*f.right, positive) < 1.0) {
          backprop(*f.left, !positive, -upstream, grad);
          backprop(*f.right, positive, upstream, grad);
        }
        return;
      default:
        throw std::invalid_argument("quantifiers cannot be compiled as ground constraints");
    }
  }
};

double triple_value(const ParameterLayout& layout, const Eigen::VectorXd& params, const TripleLoss& t,
                    Eigen::VectorXd* grad, double scale) {
  const Eigen::VectorXd r = residual(layout, params, t.pred, t.head, t.tail);
  const double rho = r.norm();
  const double excess = std::max(0.0, rho - t.delta);
  if (grad && excess > 0.0) {
    scatter_residual_gradient(layout, t.pred, t.head, t.tail, (scale * 2.0 * excess / rho) * r, *grad);
  }
  return excess * excess;
}

double similarity_value(const ParameterLayout& layout, const Eigen::VectorXd& params, const SimilarityLoss& s,
                        Eigen::VectorXd* grad, double scale) {
  const Eigen::VectorXd diff = layout.point(params, s.first) - layout.point(params, s.second);
  const double distance = diff.norm();
  const double loss = pair_disparity(s.similarity, distance, s.disparity);
  if (!grad || distance <= 0.0 || distance <= s.disparity.resolution) return loss;
  const double sd = std::max(1.0 - s.similarity, s.disparity.resolution) / distance;
  if (!(sd > s.disparity.eps_sd && sd < 1.0 / s.disparity.eps_sd)) return loss;
  // d/dD (log(num) - log(D))^2 = -2 log(SD) / D
  const double d_distance = -2.0 * std::log(sd) / distance;
  const Eigen::VectorXd g = (scale * d_distance / distance) * diff;
  grad->segment(layout.term_offset(s.first), layout.dimension()) += g;
  grad->segment(layout.term_offset(s.second), layout.dimension()) -= g;
  return loss;
}

Eigen::MatrixXd term_points(const ParameterLayout& layout, const Eigen::VectorXd& params) {
  return Eigen::Map<const Eigen::MatrixXd>(params.data(), layout.dimension(),
                                           static_cast<Eigen::Index>(layout.num_terms()));
}

double centroid_value(const ParameterLayout& layout, const Eigen::VectorXd& params, Eigen::VectorXd* grad,
                      double scale) {
  const auto n = static_cast<Eigen::Index>(layout.num_terms());
  if (n == 0) return 0.0;
  const Eigen::VectorXd c = term_points(layout, params).rowwise().mean();
  if (grad) {
    const Eigen::VectorXd g = (scale * 2.0 / static_cast<double>(n)) * c;
    for (Eigen::Index t = 0; t < n; ++t) grad->segment(t * layout.dimension(), layout.dimension()) += g;
  }
  return c.squaredNorm();
}

double spread_value(const ParameterLayout& layout, const Eigen::VectorXd& params, Eigen::VectorXd* grad,
                    double scale) {
  const auto n = static_cast<Eigen::Index>(layout.num_terms());
  if (n < 2) return 0.0;
  const Eigen::MatrixXd pts = term_points(layout, params);
  const Eigen::MatrixXd centered = pts.colwise() - pts.rowwise().mean();
  const Eigen::VectorXd radii = centered.colwise().norm().transpose();
  const double spread = radii.mean();
  if (grad) {
    Eigen::MatrixXd units = Eigen::MatrixXd::Zero(pts.rows(), n);
    for (Eigen::Index t = 0; t < n; ++t) {
      if (radii[t] > 0.0) units.col(t) = centered.col(t) / radii[t];
    }
    const Eigen::VectorXd mean_unit = units.rowwise().mean();
    const double coeff = scale * 2.0 * (spread - 1.0) / static_cast<double>(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      grad->segment(t * layout.dimension(), layout.dimension()) += coeff * (units.col(t) - mean_unit);
    }
  }
  return (spread - 1.0) * (spread - 1.0);
}

}  // namespace

double LossTerm::accumulate(const ParameterLayout& layout, const Eigen::VectorXd& params, Eigen::VectorXd* grad,
                            double scale, double sharpness_override) const {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TripleLoss>) {
          return triple_value(layout, params, p, grad, scale);
        } else if constexpr (std::is_same_v<T, SoftFormulaLoss>) {
          const double s = sharpness_override > 0.0 ? sharpness_override : p.sharpness;
          FormulaEvaluator eval{layout, params, p.delta, s, p.margin, Semantics::Soft};
          const double v = eval.value(*p.formula, true);
          const double shortfall = std::max(0.0, 1.0 - v);
          if (grad && shortfall > 0.0) eval.backprop(*p.formula, true, -2.0 * shortfall * scale, *grad);
          return shortfall * shortfall;
        } else if constexpr (std::is_same_v<T, SimilarityLoss>) {
          return similarity_value(layout, params, p, grad, scale);
        } else {
          return kind == LossKind::GaugeCentroid ? centroid_value(layout, params, grad, scale)
                                                 : spread_value(layout, params, grad, scale);
        }
      },
      payload);
}

double LossTerm::value(const ParameterLayout& layout, const Eigen::VectorXd& params) const {
  return accumulate(layout, params, nullptr, 1.0);
}

double LossTerm::hard_value(const ParameterLayout& layout, const Eigen::VectorXd& params, double delta) const {
  if (const auto* t = std::get_if<TripleLoss>(&payload)) {
    const double rho = residual(layout, params, t->pred, t->head, t->tail).norm();
    return rho < delta ? 0.0 : (rho - delta) * (rho - delta);
  }
  if (const auto* f = std::get_if<SoftFormulaLoss>(&payload)) {
    FormulaEvaluator eval{layout, params, delta, 0.0, 0.0, Semantics::Hard};
    const double shortfall = std::max(0.0, 1.0 - eval.value(*f->formula, true));
    return shortfall * shortfall;
  }
  return 0.0;
}

double LossTerm::soft_value(const ParameterLayout& layout, const Eigen::VectorXd& params) const {
  const auto* f = std::get_if<SoftFormulaLoss>(&payload);
  if (!f) throw std::logic_error("soft_value needs a formula loss term");
  FormulaEvaluator eval{layout, params, f->delta, f->sharpness, f->margin, Semantics::Soft};
  return eval.value(*f->formula, true);
}

ConstraintSystem::ConstraintSystem(ParameterLayout layout, std::vector<LossTerm> losses, CompileConfig config)
    : layout_(std::move(layout)), losses_(std::move(losses)), config_(config) {
  for (const auto& l : losses_) {
    if (!(l.weight >= 0.0)) throw std::invalid_argument("loss weights must be non-negative");
  }
}

std::size_t ConstraintSystem::count(LossKind k) const {
  return static_cast<std::size_t>(
      std::count_if(losses_.begin(), losses_.end(), [k](const LossTerm& l) { return l.kind == k; }));
}

double ConstraintSystem::total_loss(const Eigen::VectorXd& params) const {
  double total = 0.0;
  for (const auto& l : losses_) total += l.weight * l.value(layout_, params);
  return total;
}

double ConstraintSystem::total_loss(const Eigen::VectorXd& params, Eigen::VectorXd& grad,
                                    double sharpness_override) const {
  grad.setZero(params.size());
  double total = 0.0;
  for (const auto& l : losses_) total += l.weight * l.accumulate(layout_, params, &grad, l.weight, sharpness_override);
  return total;
}

Eigen::VectorXd ConstraintSystem::gradient(const Eigen::VectorXd& params) const {
  Eigen::VectorXd grad;
  total_loss(params, grad);
  return grad;
}

double ConstraintSystem::hard_loss(const Eigen::VectorXd& params) const {
  double total = 0.0;
  for (const auto& l : losses_) total += l.hard_value(layout_, params, config_.delta);
  return total;
}

VectorModel ConstraintSystem::to_model(const Eigen::VectorXd& params, TruthMode mode) const {
  if (params.size() != layout_.size()) throw std::invalid_argument("parameter vector does not match the layout");
  std::vector<PredicateEmbedding> rels;
  for (std::size_t p = 0; p < layout_.num_predicates(); ++p) {
    PredicateEmbedding e;
    const auto dims = layout_.dims(pred_id(p));
    e.dims.assign(dims.begin(), dims.end());
    e.direction = layout_.direction(params, pred_id(p));
    const double norm = e.direction.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("predicate direction collapsed to zero");
    e.direction /= norm;
    rels.push_back(std::move(e));
  }
  return VectorModel(term_points(layout_, params), std::move(rels), config_.delta, mode);
}

Eigen::VectorXd ConstraintSystem::to_params(const VectorModel& m) const {
  if (m.dimension() != layout_.dimension() || m.num_terms() != layout_.num_terms() ||
      m.num_predicates() != layout_.num_predicates()) {
    throw std::invalid_argument("model does not match the parameter layout");
  }
  Eigen::VectorXd params(layout_.size());
  Eigen::Map<Eigen::MatrixXd>(params.data(), layout_.dimension(), static_cast<Eigen::Index>(layout_.num_terms())) =
      m.points();
  for (std::size_t p = 0; p < layout_.num_predicates(); ++p) {
    const auto& rel = m.relation(pred_id(p));
    const auto dims = layout_.dims(pred_id(p));
    if (!std::equal(dims.begin(), dims.end(), rel.dims.begin(), rel.dims.end())) {
      throw std::invalid_argument("model predicate axes differ from the layout");
    }
    params.segment(layout_.pred_offset(pred_id(p)), static_cast<Eigen::Index>(dims.size())) = rel.direction;
  }
  return params;
}

LossTerm compile_triple(const Triple& t, double delta, const ParameterLayout& layout) {
  layout.term_offset(t.head);
  layout.term_offset(t.tail);
  layout.pred_offset(t.pred);
  return LossTerm{LossKind::Triple, 1.0, TripleLoss{t.pred, t.head, t.tail, delta}, {}};
}

namespace {

void check_ground_symbols(const Formula& f, const ParameterLayout& layout) {
  switch (f.kind) {
    case FormulaKind::Atom:
      if (f.head.is_variable() || f.tail.is_variable()) throw std::invalid_argument("formula is not ground");
      layout.pred_offset(f.pred);
      layout.term_offset(f.head.term);
      layout.term_offset(f.tail.term);
      return;
    case FormulaKind::Not:
      check_ground_symbols(*f.left, layout);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      throw std::invalid_argument("quantifiers cannot be compiled as ground constraints");
    default:
      check_ground_symbols(*f.left, layout);
      check_ground_symbols(*f.right, layout);
  }
}

}  // namespace

LossTerm compile_ground_implication(const FormulaPtr& f, double delta, double sharpness, const ParameterLayout& layout,
                                    double margin) {
  if (f->kind != FormulaKind::Implies || f->left->kind != FormulaKind::Atom || f->right->kind != FormulaKind::Atom) {
    throw std::invalid_argument("expected an implication between two atoms");
  }
  check_ground_symbols(*f, layout);
  return LossTerm{LossKind::AxiomInstance, 1.0, SoftFormulaLoss{f, delta, sharpness, margin}, {}};
}

std::vector<LossTerm> compile_ground_formula(const FormulaPtr& f, double delta, double sharpness,
                                             const ParameterLayout& layout, double margin) {
  check_ground_symbols(*f, layout);
  std::vector<LossTerm> out;
  std::vector<FormulaPtr> pending{f};
  while (!pending.empty()) {
    FormulaPtr g = pending.back();
    pending.pop_back();
    if (g->kind == FormulaKind::And) {
      pending.push_back(g->right);
      pending.push_back(g->left);
    } else if (g->kind == FormulaKind::Atom) {
      out.push_back(compile_triple(Triple{g->pred, g->head.term, g->tail.term}, delta * (1.0 - margin), layout));
      out.back().kind = LossKind::GroundFormula;
    } else {
      out.push_back(LossTerm{LossKind::GroundFormula, 1.0, SoftFormulaLoss{g, delta, sharpness, margin}, {}});
    }
  }
  return out;
}

std::vector<LossTerm> compile_axiom(const Axiom& ax, const KnowledgeBase& kb, double delta, double sharpness,
                                    const ParameterLayout& layout, double margin) {
  std::vector<LossTerm> out;
  const auto instances = ground_instantiations(ax, kb);
  const auto domain = kb.domain();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    out.push_back(compile_ground_implication(instances[i], delta, sharpness, layout, margin));
    out.back().label = to_string(ax, kb) + " @ " + kb.name(domain[i]);
  }
  return out;
}

std::vector<LossTerm> compile_similarity(const SimilarityMatrix& s, const ParameterLayout& layout,
                                         const DisparityOptions& opts) {
  if (s.size() != layout.num_terms()) throw std::invalid_argument("similarity matrix does not cover the terms");
  std::vector<LossTerm> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      out.push_back(LossTerm{LossKind::SimilarityPair, 1.0,
                             SimilarityLoss{term_id(i), term_id(j), s(term_id(i), term_id(j)), opts},
                             "sim(" + s.terms()[i] + ", " + s.terms()[j] + ")"});
    }
  }
  return out;
}

std::vector<LossTerm> compile_gauge(const ParameterLayout& layout, const KnowledgeBase& kb) {
  if (layout.num_terms() != kb.num_terms()) throw std::invalid_argument("layout does not match the KB terms");
  return {LossTerm{LossKind::GaugeCentroid, 1.0, GaugeLoss{}, "gauge centroid"},
          LossTerm{LossKind::GaugeScale, 1.0, GaugeLoss{}, "gauge scale"}};
}

ConstraintSystem compile_kb(const KnowledgeBase& kb, const SimilarityMatrix& s, const CompileConfig& config,
                            Eigen::Index dimension, std::vector<std::vector<Eigen::Index>> pred_dims) {
  if (pred_dims.size() != kb.num_predicates()) {
    throw std::invalid_argument("every predicate needs an axis assignment");
  }
  if (!(config.delta > 0.0)) throw std::invalid_argument("delta must be positive for compilation");
  ParameterLayout layout(dimension, kb.num_terms(), std::move(pred_dims));
  const double sharp = config.effective_sharpness();
  const double hinge = config.delta * (1.0 - config.margin);
  const auto& w = config.weights;

  std::vector<LossTerm> losses;
  for (const auto& t : kb.triples()) {
    losses.push_back(compile_triple(t, hinge, layout));
    losses.back().weight = w.triple;
    losses.back().label = to_string(t, kb);
  }
  for (const auto& ax : kb.axioms()) {
    for (auto& l : compile_axiom(ax, kb, config.delta, sharp, layout, config.margin)) {
      l.weight = w.axiom;
      losses.push_back(std::move(l));
    }
  }
  for (const auto& c : kb.constraints()) {
    for (auto& l : compile_ground_formula(c, config.delta, sharp, layout, config.margin)) {
      l.weight = w.axiom;
      l.label = to_string(*c, kb);
      losses.push_back(std::move(l));
    }
  }
  if (w.similarity > 0.0) {
    for (auto& l : compile_similarity(s, layout, config.disparity)) {
      l.weight = w.similarity;
      losses.push_back(std::move(l));
    }
  }
  if (w.gauge > 0.0) {
    for (auto& l : compile_gauge(layout, kb)) {
      l.weight = w.gauge;
      losses.push_back(std::move(l));
    }
  }
  return ConstraintSystem(std::move(layout), std::move(losses), config);
}

}  // namespace vsm
