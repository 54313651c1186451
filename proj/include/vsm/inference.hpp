// Query answering over an ensemble: a closed formula is TRUE when every
// member makes it true, FALSE when every member makes it false, UNKNOWN
// otherwise. Quantifiers range over the KB's terms.

#ifndef VSM_INFERENCE_HPP
#define VSM_INFERENCE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vsm/ensemble.hpp"
#include "vsm/geometry.hpp"
#include "vsm/logic.hpp"

namespace vsm {

enum class Truth { True, False, Unknown };

std::string_view to_string(Truth t) noexcept;

struct QueryVerdict {
  Truth value = Truth::Unknown;
  /// (member index, truth in that member)
  std::vector<std::pair<std::size_t, bool>> per_model;

  /// Members in which the query holds.
  std::size_t agreeing() const noexcept;
  /// `TRUE`, `FALSE` or `UNKNOWN (k/E models agree)`.
  std::string str() const;
};

/// Builds a verdict from per-member truth values (index order).
QueryVerdict aggregate(const std::vector<bool>& truths);

/// Throws std::invalid_argument for an empty ensemble and
/// FreeVariableError for an open formula.
QueryVerdict query_closed(const Ensemble& e, const Formula& f, const KnowledgeBase& kb);

/// Terms t for which f[var := t] holds in every member. `f` must have
/// exactly one free variable.
std::vector<TermId> query_bindings(const Ensemble& e, const FormulaPtr& f, const KnowledgeBase& kb);

/// Human-readable per-member breakdown: truth, residuals of the ground
/// atoms in `f`, fired axiom instances, and witnesses or counterexamples
/// for a top-level quantifier.
std::string explain(const Ensemble& e, const FormulaPtr& f, const KnowledgeBase& kb);

}  // namespace vsm

#endif  // VSM_INFERENCE_HPP
