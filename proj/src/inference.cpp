#include "vsm/inference.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace vsm {

std::string_view to_string(Truth t) noexcept {
  switch (t) {
    case Truth::True: return "TRUE";
    case Truth::False: return "FALSE";
    case Truth::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::size_t QueryVerdict::agreeing() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(per_model.begin(), per_model.end(), [](const auto& pm) { return pm.second; }));
}

std::string QueryVerdict::str() const {
  std::string out(to_string(value));
  if (value == Truth::Unknown) {
    out += " (" + std::to_string(agreeing()) + "/" + std::to_string(per_model.size()) + " models agree)";
  }
  return out;
}

QueryVerdict aggregate(const std::vector<bool>& truths) {
  QueryVerdict v;
  bool all_true = true;
  bool all_false = true;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    v.per_model.emplace_back(i, truths[i]);
    all_true = all_true && truths[i];
    all_false = all_false && !truths[i];
  }
  if (truths.empty()) v.value = Truth::Unknown;
  else if (all_true) v.value = Truth::True;
  else if (all_false) v.value = Truth::False;
  else v.value = Truth::Unknown;
  return v;
}

QueryVerdict query_closed(const Ensemble& e, const Formula& f, const KnowledgeBase& kb) {
  if (e.empty()) throw std::invalid_argument("query needs a nonempty ensemble");
  if (!free_vars(f).empty()) throw FreeVariableError("query formula has free variables");
  const auto domain = kb.domain();
  std::vector<bool> truths;
  truths.reserve(e.size());
  for (const auto& m : e.models) truths.push_back(eval_formula(m, f, domain));
  return aggregate(truths);
}

std::vector<TermId> query_bindings(const Ensemble& e, const FormulaPtr& f, const KnowledgeBase& kb) {
  if (e.empty()) throw std::invalid_argument("query needs a nonempty ensemble");
  const auto vars = free_vars(*f);
  if (vars.size() != 1) throw std::invalid_argument("binding query needs exactly one free variable");
  const std::string& var = *vars.begin();
  std::vector<TermId> out;
  for (TermId t : kb.domain()) {
    if (query_closed(e, *substitute(f, var, t), kb).value == Truth::True) out.push_back(t);
  }
  return out;
}

namespace {

void collect_ground_atoms(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind == FormulaKind::Atom) {
    if (!f.head.is_variable() && !f.tail.is_variable()) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const Formula* g) { return structurally_equal(*g, f); });
      if (!seen) out.push_back(&f);
    }
    return;
  }
  if (f.left) collect_ground_atoms(*f.left, out);
  if (f.right) collect_ground_atoms(*f.right, out);
}

std::string format_number(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

}  // namespace

std::string explain(const Ensemble& e, const FormulaPtr& f, const KnowledgeBase& kb) {
  std::ostringstream out;
  const auto domain = kb.domain();
  const bool closed = free_vars(*f).empty();
  out << "query: " << to_string(*f, kb) << "\n";
  if (e.empty()) {
    out << "ensemble is empty\n";
    return out.str();
  }

  std::vector<const Formula*> atoms;
  collect_ground_atoms(*f, atoms);
  std::vector<bool> truths;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto& m = e.models[i];
    out << "model " << i;
    if (closed) {
      const bool v = eval_formula(m, *f, domain);
      truths.push_back(v);
      out << ": " << (v ? "true" : "false");
    }
    out << "\n";
    for (const Formula* a : atoms) {
      const double r = relation_residual(m, a->pred, a->head.term, a->tail.term).norm();
      out << "  " << to_string(*a, kb) << "  |r| = " << format_number(r) << "  delta = " << format_number(m.delta())
          << "  " << (atom_truth(m, a->pred, a->head.term, a->tail.term) ? "holds" : "fails") << "\n";
    }
    for (const auto& ax : kb.axioms()) {
      for (TermId t : domain) {
        if (atom_truth(m, ax.antecedent_pred, t, ax.antecedent_const)) {
          out << "  fired: " << to_string(ax, kb) << " @ " << kb.name(t) << "\n";
        }
      }
    }
    if (closed && (f->kind == FormulaKind::Exists || f->kind == FormulaKind::Forall)) {
      const bool universal = f->kind == FormulaKind::Forall;
      std::vector<std::string> hits;
      for (TermId t : domain) {
        if (eval_formula(m, *substitute(f->left, f->var, t), domain) != universal) hits.push_back(kb.name(t));
      }
      out << "  " << (universal ? "counterexamples" : "witnesses") << ":";
      if (hits.empty()) out << " none";
      for (const auto& h : hits) out << " " << h;
      out << "\n";
    }
  }
  if (closed) out << "verdict: " << aggregate(truths).str() << "\n";
  return out.str();
}

}  // namespace vsm
