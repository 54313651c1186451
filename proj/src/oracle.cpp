#include "vsm/oracle.hpp"

#include <sstream>

namespace vsm {

OracleCapExceeded::OracleCapExceeded(std::size_t required)
    : std::runtime_error("oracle cap exceeded: enumeration needs " + std::to_string(required) + " bits, cap is " +
                         std::to_string(kOracleBitCap)),
      required_bits_(required) {}

std::size_t required_bits(const KnowledgeBase& kb) noexcept {
  return kb.num_terms() * kb.num_terms() * kb.num_predicates();
}

void check_oracle_cap(const KnowledgeBase& kb) {
  const std::size_t bits = required_bits(kb);
  if (bits > kOracleBitCap) throw OracleCapExceeded(bits);
}

void FiniteStructure::set(PredId p, TermId head, TermId tail, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << bit_index(p, head, tail);
  bits = value ? (bits | bit) : (bits & ~bit);
}

FiniteStructure FiniteStructure::from_induced(const InducedRelations& r) {
  FiniteStructure s;
  s.num_predicates = r.tables.size();
  s.num_terms = r.tables.empty() ? 0 : static_cast<std::size_t>(r.tables.front().rows());
  if (s.num_terms * s.num_terms * s.num_predicates > 64) throw OracleCapExceeded(s.num_terms * s.num_terms * s.num_predicates);
  for (std::size_t p = 0; p < s.num_predicates; ++p) {
    for (std::size_t h = 0; h < s.num_terms; ++h) {
      for (std::size_t t = 0; t < s.num_terms; ++t) {
        if (r.tables[p](static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(t))) s.set(pred_id(p), term_id(h), term_id(t), true);
      }
    }
  }
  return s;
}

namespace {

struct Env {
  std::vector<std::pair<std::string_view, TermId>> bindings;

  TermId lookup(const Arg& a) const {
    if (!a.is_variable()) return a.term;
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
      if (it->first == a.var) return it->second;
    }
    throw FreeVariableError("free variable '" + a.var + "' during classical evaluation");
  }
};

bool eval(const FiniteStructure& s, const Formula& f, Env& env) {
  switch (f.kind) {
    case FormulaKind::Atom: {
      const TermId h = env.lookup(f.head);
      const TermId t = env.lookup(f.tail);
      if (index(f.pred) >= s.num_predicates || index(h) >= s.num_terms || index(t) >= s.num_terms) {
        throw std::out_of_range("formula symbol outside the structure");
      }
      return s.holds(f.pred, h, t);
    }
    case FormulaKind::Not: return !eval(s, *f.left, env);
    case FormulaKind::And: return eval(s, *f.left, env) && eval(s, *f.right, env);
    case FormulaKind::Or: return eval(s, *f.left, env) || eval(s, *f.right, env);
    case FormulaKind::Implies: return !eval(s, *f.left, env) || eval(s, *f.right, env);
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const bool universal = f.kind == FormulaKind::Forall;
      env.bindings.emplace_back(f.var, TermId{});
      bool result = universal;
      for (std::size_t i = 0; i < s.num_terms; ++i) {
        env.bindings.back().second = term_id(i);
        if (eval(s, *f.left, env) != universal) {
          result = !universal;
          break;
        }
      }
      env.bindings.pop_back();
      return result;
    }
  }
  return false;
}

}  // namespace

bool evaluate_classical(const FiniteStructure& s, const Formula& f) {
  Env env;
  return eval(s, f, env);
}

bool structure_satisfies(const FiniteStructure& s, const KnowledgeBase& kb) {
  for (const auto& t : kb.triples()) {
    if (!s.holds(t.pred, t.head, t.tail)) return false;
  }
  for (const auto& ax : kb.axioms()) {
    for (std::size_t i = 0; i < s.num_terms; ++i) {
      if (s.holds(ax.antecedent_pred, term_id(i), ax.antecedent_const) &&
          !s.holds(ax.consequent_pred, term_id(i), ax.consequent_const)) {
        return false;
      }
    }
  }
  for (const auto& c : kb.constraints()) {
    if (!evaluate_classical(s, *c)) return false;
  }
  return true;
}

SatisfyingStructures::SatisfyingStructures(const KnowledgeBase& kb) : kb_(&kb) {
  check_oracle_cap(kb);
  FiniteStructure probe{kb.num_terms(), kb.num_predicates(), 0};
  for (const auto& t : kb.triples()) probe.set(t.pred, t.head, t.tail, true);
  pinned_ = probe.bits;
  const std::size_t bits = required_bits(kb);
  const std::uint64_t all = bits == 0 ? 0 : ((std::uint64_t{1} << bits) - 1);
  free_mask_ = all & ~pinned_;
}

SatisfyingStructures::iterator::iterator(const SatisfyingStructures* owner, bool done) : owner_(owner), done_(done) {
  if (done_) return;
  current_ = FiniteStructure{owner_->kb_->num_terms(), owner_->kb_->num_predicates(), owner_->pinned_};
  free_ = 0;
  settle();
}

bool SatisfyingStructures::iterator::advance_raw() {
  const std::uint64_t mask = owner_->free_mask_;
  free_ = ((free_ | ~mask) + 1) & mask;  // next submask in increasing order
  if (free_ == 0) return false;
  current_.bits = owner_->pinned_ | free_;
  return true;
}

void SatisfyingStructures::iterator::settle() {
  while (!structure_satisfies(current_, *owner_->kb_)) {
    if (!advance_raw()) {
      done_ = true;
      return;
    }
  }
}

SatisfyingStructures::iterator& SatisfyingStructures::iterator::operator++() {
  if (done_) return *this;
  if (!advance_raw()) {
    done_ = true;
    return *this;
  }
  settle();
  return *this;
}

SatisfyingStructures enumerate_satisfying(const KnowledgeBase& kb) { return SatisfyingStructures(kb); }

std::vector<FiniteStructure> satisfying_structures(const KnowledgeBase& kb) {
  std::vector<FiniteStructure> out;
  for (const auto& s : enumerate_satisfying(kb)) out.push_back(s);
  return out;
}

std::string_view to_string(OracleStatus s) noexcept {
  switch (s) {
    case OracleStatus::Entailed: return "entailed";
    case OracleStatus::RefutedInAll: return "refuted-in-all";
    case OracleStatus::Contingent: return "contingent";
  }
  return "contingent";
}

OracleStatus classical_status(std::span<const FiniteStructure> models, const Formula& f) {
  if (!free_vars(f).empty()) throw FreeVariableError("oracle query has free variables");
  bool any_true = false;
  bool any_false = false;
  for (const auto& s : models) {
    (evaluate_classical(s, f) ? any_true : any_false) = true;
    if (any_true && any_false) return OracleStatus::Contingent;
  }
  if (!any_false) return OracleStatus::Entailed;  // includes the vacuous case
  return OracleStatus::RefutedInAll;
}

OracleStatus classical_status(const KnowledgeBase& kb, const Formula& f) {
  const auto models = satisfying_structures(kb);
  return classical_status(models, f);
}

bool classical_entails(const KnowledgeBase& kb, const Formula& f) {
  if (!free_vars(f).empty()) throw FreeVariableError("oracle query has free variables");
  for (const auto& s : enumerate_satisfying(kb)) {
    if (!evaluate_classical(s, f)) return false;
  }
  return true;
}

std::size_t ComparisonReport::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t c : row) n += c;
  }
  return n;
}

double ComparisonReport::generalization_rate() const noexcept {
  std::size_t contingent = 0;
  for (const auto& row : counts) contingent += row[static_cast<std::size_t>(OracleStatus::Contingent)];
  return contingent == 0 ? 0.0 : static_cast<double>(generalization_hits.size()) / static_cast<double>(contingent);
}

namespace {

constexpr std::array<Truth, 3> kVerdicts{Truth::True, Truth::False, Truth::Unknown};
constexpr std::array<OracleStatus, 3> kStatuses{OracleStatus::Entailed, OracleStatus::RefutedInAll,
                                                OracleStatus::Contingent};

}  // namespace

std::string ComparisonReport::to_text() const {
  std::ostringstream out;
  out << "satisfying structures: " << satisfying_structures << "\n";
  out << "query\tverdict\toracle\tformula\n";
  for (const auto& r : rows) {
    out << r.query << "\t" << r.verdict.str() << "\t" << to_string(r.status) << "\t" << r.formula << "\n";
  }
  out << "\nverdict \\ oracle\tentailed\trefuted-in-all\tcontingent\n";
  for (std::size_t v = 0; v < 3; ++v) {
    out << to_string(kVerdicts[v]);
    for (std::size_t s = 0; s < 3; ++s) out << "\t" << counts[v][s];
    out << "\n";
  }
  out << "\ngeneralization hits: " << generalization_hits.size() << " (rate " << generalization_rate() << ")\n";
  for (std::size_t i : generalization_hits) out << "  " << rows[i].query << "\n";
  out << "soundness violations: " << soundness_violations.size() << "\n";
  for (std::size_t i : soundness_violations) out << "  " << rows[i].query << "\n";
  return out.str();
}

nlohmann::ordered_json ComparisonReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["satisfying_structures"] = satisfying_structures;
  auto& jrows = doc["queries"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["query"] = r.query;
    row["formula"] = r.formula;
    row["verdict"] = to_string(r.verdict.value);
    row["agreeing"] = r.verdict.agreeing();
    row["members"] = r.verdict.per_model.size();
    row["oracle"] = to_string(r.status);
    jrows.push_back(std::move(row));
  }
  auto& jcounts = doc["counts"];
  for (std::size_t v = 0; v < 3; ++v) {
    for (std::size_t s = 0; s < 3; ++s) jcounts[std::string(to_string(kVerdicts[v]))][std::string(to_string(kStatuses[s]))] = counts[v][s];
  }
  doc["generalization_rate"] = generalization_rate();
  auto names = [&](const std::vector<std::size_t>& idx) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i : idx) arr.push_back(rows[i].query);
    return arr;
  };
  doc["generalization_hits"] = names(generalization_hits);
  doc["soundness_violations"] = names(soundness_violations);
  return doc;
}

ComparisonReport compare(const Ensemble& e, const KnowledgeBase& kb, std::span<const NamedQuery> queries) {
  const auto models = satisfying_structures(kb);
  ComparisonReport report;
  report.satisfying_structures = models.size();
  auto add_row = [&](std::string name, const FormulaPtr& f) {
    ComparisonRow row{std::move(name), to_string(*f, kb), query_closed(e, *f, kb), classical_status(models, *f)};
    const auto v = static_cast<std::size_t>(row.verdict.value);
    const auto s = static_cast<std::size_t>(row.status);
    ++report.counts[v][s];
    if (row.verdict.value == Truth::True && row.status == OracleStatus::Contingent) {
      report.generalization_hits.push_back(report.rows.size());
    }
    if (row.verdict.value == Truth::True && row.status == OracleStatus::RefutedInAll) {
      report.soundness_violations.push_back(report.rows.size());
    }
    report.rows.push_back(std::move(row));
  };
  for (const auto& q : queries) {
    const auto vars = free_vars(*q.formula);
    if (vars.empty()) {
      add_row(q.name, q.formula);
      continue;
    }
    if (vars.size() != 1) throw std::invalid_argument("query '" + q.name + "' has more than one free variable");
    for (TermId t : kb.domain()) add_row(q.name + "[" + kb.name(t) + "]", substitute(q.formula, *vars.begin(), t));
  }
  return report;
}

}  // namespace vsm
