// Logical language: binary predicates over named terms, closed first-order
// formulas, and the knowledge base container.

#ifndef VSM_LOGIC_HPP
#define VSM_LOGIC_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vsm {

enum class TermId : std::uint32_t {};
enum class PredId : std::uint32_t {};

constexpr std::size_t index(TermId t) noexcept { return static_cast<std::size_t>(t); }
constexpr std::size_t index(PredId p) noexcept { return static_cast<std::size_t>(p); }
constexpr TermId term_id(std::size_t i) noexcept { return static_cast<TermId>(i); }
constexpr PredId pred_id(std::size_t i) noexcept { return static_cast<PredId>(i); }

/// Atom argument: either a KB term or a variable name.
struct Arg {
  TermId term{};
  std::string var;

  static Arg constant(TermId t) { return Arg{t, {}}; }
  static Arg variable(std::string name) { return Arg{TermId{}, std::move(name)}; }

  bool is_variable() const noexcept { return !var.empty(); }
  bool operator==(const Arg&) const = default;
};

enum class FormulaKind { Atom, Not, And, Or, Implies, Forall, Exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable formula node. Atoms use pred/head/tail; Not uses left;
/// binary connectives use left/right; quantifiers use var and left (body).
struct Formula {
  FormulaKind kind = FormulaKind::Atom;
  PredId pred{};
  Arg head;
  Arg tail;
  FormulaPtr left;
  FormulaPtr right;
  std::string var;
};

FormulaPtr make_atom(PredId p, Arg head, Arg tail);
FormulaPtr make_not(FormulaPtr body);
FormulaPtr make_and(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_or(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_forall(std::string var, FormulaPtr body);
FormulaPtr make_exists(std::string var, FormulaPtr body);

bool structurally_equal(const Formula& a, const Formula& b);

/// Variables occurring in atoms that no enclosing quantifier binds.
std::set<std::string> free_vars(const Formula& f);

/// Node count.
std::size_t formula_size(const Formula& f);
/// Maximum number of nested quantifiers along any path.
std::size_t quantifier_depth(const Formula& f);
/// No quantifiers and no variables.
bool is_ground(const Formula& f);

/// Replaces free occurrences of `var` by the term `t`.
FormulaPtr substitute(const FormulaPtr& f, std::string_view var, TermId t);

struct Triple {
  PredId pred{};
  TermId head{};
  TermId tail{};
  auto operator<=>(const Triple&) const = default;
};

/// forall x: antecedent_pred(x, antecedent_const) => consequent_pred(x, consequent_const)
struct Axiom {
  PredId antecedent_pred{};
  TermId antecedent_const{};
  PredId consequent_pred{};
  TermId consequent_const{};
  auto operator<=>(const Axiom&) const = default;
};

struct NamedQuery {
  std::string name;
  FormulaPtr formula;
  /// Set for single-variable binding queries (written `?x` in text).
  std::optional<std::string> free_var;
};

class KnowledgeBase {
 public:
  /// Idempotent: returns the existing id when already declared.
  TermId declare_term(std::string_view name);
  PredId declare_predicate(std::string_view name);

  std::optional<TermId> find_term(std::string_view name) const;
  std::optional<PredId> find_predicate(std::string_view name) const;

  /// Returns false (and stores nothing) for a duplicate.
  bool add_triple(const Triple& t);
  bool add_axiom(const Axiom& a);
  /// Ground formula constraint; must satisfy is_ground.
  void add_constraint(FormulaPtr f);
  /// Throws std::invalid_argument on a duplicate name or a free-variable mismatch.
  void add_query(NamedQuery q);

  const std::string& name(TermId t) const { return terms_.at(index(t)); }
  const std::string& name(PredId p) const { return preds_.at(index(p)); }

  std::size_t num_terms() const noexcept { return terms_.size(); }
  std::size_t num_predicates() const noexcept { return preds_.size(); }
  std::span<const std::string> term_names() const noexcept { return terms_; }
  std::span<const std::string> predicate_names() const noexcept { return preds_; }
  /// The quantifier domain: every term, in declaration order.
  std::vector<TermId> domain() const;

  std::span<const Triple> triples() const noexcept { return triples_; }
  std::span<const Axiom> axioms() const noexcept { return axioms_; }
  std::span<const FormulaPtr> constraints() const noexcept { return constraints_; }
  std::span<const NamedQuery> queries() const noexcept { return queries_; }
  const NamedQuery* find_query(std::string_view name) const;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

 private:
  std::vector<std::string> terms_;
  std::vector<std::string> preds_;
  std::unordered_map<std::string, TermId> term_index_;
  std::unordered_map<std::string, PredId> pred_index_;
  std::vector<Triple> triples_;
  std::vector<Axiom> axioms_;
  std::vector<FormulaPtr> constraints_;
  std::vector<NamedQuery> queries_;
};

/// The universal axiom as a formula: forall x: P(x,A) => Q(x,B).
FormulaPtr axiom_formula(const Axiom& ax);

/// One ground implication P(t,A) => Q(t,B) per KB term, in term order.
std::vector<FormulaPtr> ground_instantiations(const Axiom& ax, const KnowledgeBase& kb);

std::string to_string(const Formula& f, const KnowledgeBase& kb);
std::string to_string(const Triple& t, const KnowledgeBase& kb);
std::string to_string(const Axiom& a, const KnowledgeBase& kb);

/// Text form accepted by parse_kb; parse_kb(print_kb(kb)) == kb.
std::string print_kb(const KnowledgeBase& kb);

}  // namespace vsm

#endif  // VSM_LOGIC_HPP
