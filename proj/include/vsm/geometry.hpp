// Vector-space models: terms are points in R^N, each binary predicate is a
// unit vector living in an axis-aligned K-dimensional subspace. An atom
// P(a, b) holds when the projection of M(b) - M(a) onto P's axes points the
// same way as M(P) (strict mode) or lands within delta of it (approximate
// mode).
//
// Everything here is templated on the scalar type; `VectorModel` is the
// double-precision instantiation used by the rest of the library.

#ifndef VSM_GEOMETRY_HPP
#define VSM_GEOMETRY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsm/logic.hpp"

namespace vsm {

enum class TruthMode { Strict, Approximate };

std::string_view to_string(TruthMode m) noexcept;
TruthMode truth_mode_from_string(std::string_view s);

/// Thrown by formula evaluation when a variable has no binding.
class FreeVariableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct PredicateEmbeddingT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<Eigen::Index> dims;  // strictly increasing axis indices
  Vector direction;                // unit length, size == dims.size()
};

template <typename Scalar>
class VectorModelT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Embedding = PredicateEmbeddingT<Scalar>;

  static constexpr double kUnitTolerance = 1e-9;

  /// `points` is N x |terms|, one column per term in KB order.
  VectorModelT(Matrix points, std::vector<Embedding> relations, Scalar delta, TruthMode mode,
               Scalar angle_tolerance = Scalar(1e-6))
      : points_(std::move(points)),
        relations_(std::move(relations)),
        delta_(delta),
        mode_(mode),
        angle_tolerance_(angle_tolerance) {
    using std::abs;
    if (points_.rows() < 1) throw std::invalid_argument("model dimension must be positive");
    if (!(delta_ >= Scalar(0))) throw std::invalid_argument("delta must be non-negative");
    for (const auto& r : relations_) {
      if (r.dims.empty() || static_cast<Eigen::Index>(r.dims.size()) > dimension()) {
        throw std::invalid_argument("predicate subspace must have 1 <= K <= N axes");
      }
      for (std::size_t i = 0; i < r.dims.size(); ++i) {
        if (r.dims[i] < 0 || r.dims[i] >= dimension() || (i > 0 && r.dims[i] <= r.dims[i - 1])) {
          throw std::invalid_argument("predicate axes must be strictly increasing and inside [0, N)");
        }
      }
      if (r.direction.size() != static_cast<Eigen::Index>(r.dims.size())) {
        throw std::invalid_argument("predicate direction size must equal its axis count");
      }
      if (abs(static_cast<double>(r.direction.norm()) - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("predicate direction must be a unit vector");
      }
    }
  }

  Eigen::Index dimension() const noexcept { return points_.rows(); }
  std::size_t num_terms() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t num_predicates() const noexcept { return relations_.size(); }
  Scalar delta() const noexcept { return delta_; }
  TruthMode mode() const noexcept { return mode_; }
  Scalar angle_tolerance() const noexcept { return angle_tolerance_; }

  const Matrix& points() const noexcept { return points_; }
  auto point(TermId t) const {
    if (index(t) >= num_terms()) throw std::out_of_range("term has no point in this model");
    return points_.col(static_cast<Eigen::Index>(index(t)));
  }
  const Embedding& relation(PredId p) const {
    if (index(p) >= relations_.size()) throw std::out_of_range("predicate has no embedding in this model");
    return relations_[index(p)];
  }
  std::span<const Embedding> relations() const noexcept { return relations_; }

  VectorModelT with_delta(Scalar d) const { return VectorModelT(points_, relations_, d, mode_, angle_tolerance_); }
  VectorModelT with_mode(TruthMode m) const { return VectorModelT(points_, relations_, delta_, m, angle_tolerance_); }
  VectorModelT with_points(Matrix p) const {
    return VectorModelT(std::move(p), relations_, delta_, mode_, angle_tolerance_);
  }

 private:
  Matrix points_;
  std::vector<Embedding> relations_;
  Scalar delta_;
  TruthMode mode_;
  Scalar angle_tolerance_;
};

using PredicateEmbedding = PredicateEmbeddingT<double>;
using VectorModel = VectorModelT<double>;

/// Coordinates of `to - from` on the given axes.
template <typename DerivedFrom, typename DerivedTo>
auto project_difference(const Eigen::MatrixBase<DerivedFrom>& from, const Eigen::MatrixBase<DerivedTo>& to,
                        std::span<const Eigen::Index> dims) {
  using Scalar = typename DerivedFrom::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t k = 0; k < dims.size(); ++k) out[static_cast<Eigen::Index>(k)] = to[dims[k]] - from[dims[k]];
  return out;
}

/// Projected head-to-tail difference minus the predicate direction.
template <typename Scalar>
typename VectorModelT<Scalar>::Vector relation_residual(const VectorModelT<Scalar>& m, PredId p, TermId head,
                                                        TermId tail) {
  const auto& rel = m.relation(p);
  return project_difference(m.point(head), m.point(tail), rel.dims) - rel.direction;
}

/// Angle between two vectors, accurate near zero.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar angle_between(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using std::atan2;
  const auto b_hat = b.normalized();
  const auto along = a.dot(b_hat);
  const auto across = (a - along * b_hat).norm();
  return atan2(across, along);
}

template <typename Scalar>
bool atom_truth(const VectorModelT<Scalar>& m, PredId p, TermId head, TermId tail) {
  const auto& rel = m.relation(p);
  const auto diff = project_difference(m.point(head), m.point(tail), rel.dims);
  if (m.mode() == TruthMode::Approximate) return (diff - rel.direction).norm() < m.delta();
  if (!(diff.norm() > Scalar(1e-12))) return false;
  return angle_between(diff, rel.direction) <= m.angle_tolerance();
}

namespace detail {

struct Binding {
  std::string_view var;
  TermId value;
};

inline TermId resolve(const Arg& a, const std::vector<Binding>& env) {
  if (!a.is_variable()) return a.term;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->var == a.var) return it->value;
  }
  throw FreeVariableError("free variable '" + a.var + "' during evaluation");
}

template <typename Scalar>
bool evaluate(const VectorModelT<Scalar>& m, const Formula& f, std::span<const TermId> domain,
              std::vector<Binding>& env) {
  switch (f.kind) {
    case FormulaKind::Atom:
      return atom_truth(m, f.pred, resolve(f.head, env), resolve(f.tail, env));
    case FormulaKind::Not:
      return !evaluate(m, *f.left, domain, env);
    case FormulaKind::And:
      return evaluate(m, *f.left, domain, env) && evaluate(m, *f.right, domain, env);
    case FormulaKind::Or:
      return evaluate(m, *f.left, domain, env) || evaluate(m, *f.right, domain, env);
    case FormulaKind::Implies:
      return !evaluate(m, *f.left, domain, env) || evaluate(m, *f.right, domain, env);
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const bool universal = f.kind == FormulaKind::Forall;
      env.push_back({f.var, TermId{}});
      bool result = universal;
      for (TermId t : domain) {
        env.back().value = t;
        if (evaluate(m, *f.left, domain, env) != universal) {
          result = !universal;
          break;
        }
      }
      env.pop_back();
      return result;
    }
  }
  return false;
}

}  // namespace detail

/// Truth of a closed formula; quantifiers range over `domain`.
template <typename Scalar>
bool eval_formula(const VectorModelT<Scalar>& m, const Formula& f, std::span<const TermId> domain) {
  if (domain.empty()) throw std::invalid_argument("evaluation domain must be nonempty");
  std::vector<detail::Binding> env;
  return detail::evaluate(m, f, domain, env);
}

struct Violation {
  enum class Kind { Triple, AxiomInstance, Constraint };
  Kind kind;
  std::string description;
};

struct SatisfactionReport {
  bool satisfied = true;
  std::vector<Violation> violations;
};

template <typename Scalar>
void check_coverage(const VectorModelT<Scalar>& m, const KnowledgeBase& kb) {
  if (m.num_terms() != kb.num_terms() || m.num_predicates() != kb.num_predicates()) {
    throw std::invalid_argument("model does not cover the knowledge base symbols");
  }
}

template <typename Scalar>
SatisfactionReport satisfies_kb(const VectorModelT<Scalar>& m, const KnowledgeBase& kb) {
  check_coverage(m, kb);
  SatisfactionReport report;
  auto violate = [&](Violation::Kind k, std::string d) {
    report.satisfied = false;
    report.violations.push_back({k, std::move(d)});
  };
  for (const auto& t : kb.triples()) {
    if (!atom_truth(m, t.pred, t.head, t.tail)) violate(Violation::Kind::Triple, to_string(t, kb));
  }
  for (const auto& ax : kb.axioms()) {
    for (TermId t : kb.domain()) {
      if (atom_truth(m, ax.antecedent_pred, t, ax.antecedent_const) &&
          !atom_truth(m, ax.consequent_pred, t, ax.consequent_const)) {
        violate(Violation::Kind::AxiomInstance, to_string(ax, kb) + " @ " + kb.name(t));
      }
    }
  }
  const auto domain = kb.domain();
  for (const auto& c : kb.constraints()) {
    if (!eval_formula(m, *c, domain)) violate(Violation::Kind::Constraint, to_string(*c, kb));
  }
  return report;
}

/// Per predicate, a |terms| x |terms| table: (head, tail) -> atom truth.
struct InducedRelations {
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> tables;

  bool holds(PredId p, TermId head, TermId tail) const {
    return tables.at(index(p))(static_cast<Eigen::Index>(index(head)), static_cast<Eigen::Index>(index(tail)));
  }
  friend bool operator==(const InducedRelations& a, const InducedRelations& b) {
    if (a.tables.size() != b.tables.size()) return false;
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      if (a.tables[i].rows() != b.tables[i].rows() || a.tables[i].cols() != b.tables[i].cols() ||
          (a.tables[i] != b.tables[i]).any()) {
        return false;
      }
    }
    return true;
  }
};

template <typename Scalar>
InducedRelations induced_relations(const VectorModelT<Scalar>& m, const KnowledgeBase& kb) {
  check_coverage(m, kb);
  const auto n = static_cast<Eigen::Index>(kb.num_terms());
  InducedRelations out;
  out.tables.reserve(kb.num_predicates());
  for (std::size_t p = 0; p < kb.num_predicates(); ++p) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> table(n, n);
    for (Eigen::Index h = 0; h < n; ++h) {
      for (Eigen::Index t = 0; t < n; ++t) {
        table(h, t) = atom_truth(m, pred_id(p), term_id(static_cast<std::size_t>(h)), term_id(static_cast<std::size_t>(t)));
      }
    }
    out.tables.push_back(std::move(table));
  }
  return out;
}

/// Every point shifted by `offset`; predicates unchanged.
template <typename Scalar, typename Derived>
VectorModelT<Scalar> transform_translate(const VectorModelT<Scalar>& m, const Eigen::MatrixBase<Derived>& offset) {
  if (offset.size() != m.dimension()) throw std::invalid_argument("offset length must equal the model dimension");
  typename VectorModelT<Scalar>::Matrix shifted = m.points().colwise() + offset.template cast<Scalar>();
  return m.with_points(std::move(shifted));
}

/// Every point multiplied by `factor`; predicates unchanged.
template <typename Scalar>
VectorModelT<Scalar> transform_scale(const VectorModelT<Scalar>& m, Scalar factor) {
  return m.with_points(m.points() * factor);
}

}  // namespace vsm

#endif  // VSM_GEOMETRY_HPP
