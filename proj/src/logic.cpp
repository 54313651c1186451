#include "vsm/logic.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace vsm {

namespace {

constexpr std::array<std::string_view, 8> kKeywords = {"term",   "pred", "query", "forall",
                                                       "exists", "not",  "and",   "or"};

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  if (!std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); })) return false;
  return std::find(kKeywords.begin(), kKeywords.end(), s) == kKeywords.end();
}

FormulaPtr make_node(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

void collect_free(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind) {
    case FormulaKind::Atom:
      for (const Arg* a : {&f.head, &f.tail}) {
        if (a->is_variable() && std::find(bound.begin(), bound.end(), a->var) == bound.end()) {
          out.insert(a->var);
        }
      }
      return;
    case FormulaKind::Not:
      collect_free(*f.left, bound, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      collect_free(*f.left, bound, out);
      collect_free(*f.right, bound, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      bound.push_back(f.var);
      collect_free(*f.left, bound, out);
      bound.pop_back();
      return;
  }
}

std::string arg_string(const Arg& a, const KnowledgeBase& kb, const std::vector<std::string>& bound) {
  if (!a.is_variable()) return kb.name(a.term);
  if (std::find(bound.begin(), bound.end(), a.var) != bound.end()) return a.var;
  return "?" + a.var;
}

std::string print(const Formula& f, const KnowledgeBase& kb, std::vector<std::string>& bound, bool operand) {
  auto wrap = [operand](std::string s) { return operand ? "(" + s + ")" : s; };
  switch (f.kind) {
    case FormulaKind::Atom:
      return kb.name(f.pred) + "(" + arg_string(f.head, kb, bound) + ", " + arg_string(f.tail, kb, bound) + ")";
    case FormulaKind::Not:
      return "not " + print(*f.left, kb, bound, true);
    case FormulaKind::And:
      return wrap(print(*f.left, kb, bound, true) + " and " + print(*f.right, kb, bound, true));
    case FormulaKind::Or:
      return wrap(print(*f.left, kb, bound, true) + " or " + print(*f.right, kb, bound, true));
    case FormulaKind::Implies:
      return wrap(print(*f.left, kb, bound, true) + " => " + print(*f.right, kb, bound, true));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::string head = (f.kind == FormulaKind::Forall ? "forall " : "exists ") + f.var + ": ";
      bound.push_back(f.var);
      std::string body = print(*f.left, kb, bound, false);
      bound.pop_back();
      return wrap(head + body);
    }
  }
  return {};
}

}  // namespace

FormulaPtr make_atom(PredId p, Arg head, Arg tail) {
  Formula f;
  f.kind = FormulaKind::Atom;
  f.pred = p;
  f.head = std::move(head);
  f.tail = std::move(tail);
  return make_node(std::move(f));
}

FormulaPtr make_not(FormulaPtr body) {
  Formula f;
  f.kind = FormulaKind::Not;
  f.left = std::move(body);
  return make_node(std::move(f));
}

namespace {
FormulaPtr make_binary(FormulaKind k, FormulaPtr l, FormulaPtr r) {
  Formula f;
  f.kind = k;
  f.left = std::move(l);
  f.right = std::move(r);
  return make_node(std::move(f));
}
FormulaPtr make_quantifier(FormulaKind k, std::string var, FormulaPtr body) {
  if (var.empty()) throw std::invalid_argument("quantifier variable must be named");
  Formula f;
  f.kind = k;
  f.var = std::move(var);
  f.left = std::move(body);
  return make_node(std::move(f));
}
}  // namespace

FormulaPtr make_and(FormulaPtr l, FormulaPtr r) { return make_binary(FormulaKind::And, std::move(l), std::move(r)); }
FormulaPtr make_or(FormulaPtr l, FormulaPtr r) { return make_binary(FormulaKind::Or, std::move(l), std::move(r)); }
FormulaPtr make_implies(FormulaPtr l, FormulaPtr r) {
  return make_binary(FormulaKind::Implies, std::move(l), std::move(r));
}
FormulaPtr make_forall(std::string var, FormulaPtr body) {
  return make_quantifier(FormulaKind::Forall, std::move(var), std::move(body));
}
FormulaPtr make_exists(std::string var, FormulaPtr body) {
  return make_quantifier(FormulaKind::Exists, std::move(var), std::move(body));
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::Atom:
      return a.pred == b.pred && a.head == b.head && a.tail == b.tail;
    case FormulaKind::Not:
      return structurally_equal(*a.left, *b.left);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return structurally_equal(*a.left, *b.left) && structurally_equal(*a.right, *b.right);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return a.var == b.var && structurally_equal(*a.left, *b.left);
  }
  return false;
}

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(f, bound, out);
  return out;
}

std::size_t formula_size(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom:
      return 1;
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 1 + formula_size(*f.left);
    default:
      return 1 + formula_size(*f.left) + formula_size(*f.right);
  }
}

std::size_t quantifier_depth(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom:
      return 0;
    case FormulaKind::Not:
      return quantifier_depth(*f.left);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 1 + quantifier_depth(*f.left);
    default:
      return std::max(quantifier_depth(*f.left), quantifier_depth(*f.right));
  }
}

bool is_ground(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Atom:
      return !f.head.is_variable() && !f.tail.is_variable();
    case FormulaKind::Not:
      return is_ground(*f.left);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return false;
    default:
      return is_ground(*f.left) && is_ground(*f.right);
  }
}

FormulaPtr substitute(const FormulaPtr& f, std::string_view var, TermId t) {
  switch (f->kind) {
    case FormulaKind::Atom: {
      auto replace = [&](const Arg& a) { return a.is_variable() && a.var == var ? Arg::constant(t) : a; };
      Arg h = replace(f->head);
      Arg tl = replace(f->tail);
      if (h == f->head && tl == f->tail) return f;
      return make_atom(f->pred, std::move(h), std::move(tl));
    }
    case FormulaKind::Not:
      return make_not(substitute(f->left, var, t));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return make_binary(f->kind, substitute(f->left, var, t), substitute(f->right, var, t));
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      if (f->var == var) return f;  // shadowed
      return make_quantifier(f->kind, f->var, substitute(f->left, var, t));
  }
  return f;
}

TermId KnowledgeBase::declare_term(std::string_view name) {
  if (auto it = term_index_.find(std::string(name)); it != term_index_.end()) return it->second;
  if (!valid_identifier(name)) throw std::invalid_argument("invalid term name '" + std::string(name) + "'");
  TermId id = term_id(terms_.size());
  terms_.emplace_back(name);
  term_index_.emplace(terms_.back(), id);
  return id;
}

PredId KnowledgeBase::declare_predicate(std::string_view name) {
  if (auto it = pred_index_.find(std::string(name)); it != pred_index_.end()) return it->second;
  if (!valid_identifier(name)) throw std::invalid_argument("invalid predicate name '" + std::string(name) + "'");
  PredId id = pred_id(preds_.size());
  preds_.emplace_back(name);
  pred_index_.emplace(preds_.back(), id);
  return id;
}

std::optional<TermId> KnowledgeBase::find_term(std::string_view name) const {
  if (auto it = term_index_.find(std::string(name)); it != term_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<PredId> KnowledgeBase::find_predicate(std::string_view name) const {
  if (auto it = pred_index_.find(std::string(name)); it != pred_index_.end()) return it->second;
  return std::nullopt;
}

bool KnowledgeBase::add_triple(const Triple& t) {
  if (index(t.pred) >= preds_.size() || index(t.head) >= terms_.size() || index(t.tail) >= terms_.size()) {
    throw std::out_of_range("triple references an undeclared symbol");
  }
  if (std::find(triples_.begin(), triples_.end(), t) != triples_.end()) return false;
  triples_.push_back(t);
  return true;
}

bool KnowledgeBase::add_axiom(const Axiom& a) {
  if (index(a.antecedent_pred) >= preds_.size() || index(a.consequent_pred) >= preds_.size() ||
      index(a.antecedent_const) >= terms_.size() || index(a.consequent_const) >= terms_.size()) {
    throw std::out_of_range("axiom references an undeclared symbol");
  }
  if (std::find(axioms_.begin(), axioms_.end(), a) != axioms_.end()) return false;
  axioms_.push_back(a);
  return true;
}

void KnowledgeBase::add_constraint(FormulaPtr f) {
  if (!f || !is_ground(*f)) throw std::invalid_argument("constraints must be ground formulas");
  // a bare atom is a triple
  if (f->kind == FormulaKind::Atom) throw std::invalid_argument("atomic constraints must be added as triples");
  constraints_.push_back(std::move(f));
}

void KnowledgeBase::add_query(NamedQuery q) {
  if (find_query(q.name)) throw std::invalid_argument("duplicate query name '" + q.name + "'");
  auto fv = free_vars(*q.formula);
  if (q.free_var) {
    if (fv.size() != 1 || *fv.begin() != *q.free_var) {
      throw std::invalid_argument("query '" + q.name + "' must have exactly the one free variable ?" + *q.free_var);
    }
  } else if (!fv.empty()) {
    throw std::invalid_argument("query '" + q.name + "' has unbound variable " + *fv.begin());
  }
  queries_.push_back(std::move(q));
}

const NamedQuery* KnowledgeBase::find_query(std::string_view name) const {
  for (const auto& q : queries_) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

std::vector<TermId> KnowledgeBase::domain() const {
  std::vector<TermId> d(terms_.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = term_id(i);
  return d;
}

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  if (a.terms_ != b.terms_ || a.preds_ != b.preds_ || a.triples_ != b.triples_ || a.axioms_ != b.axioms_) {
    return false;
  }
  if (a.constraints_.size() != b.constraints_.size() || a.queries_.size() != b.queries_.size()) return false;
  for (std::size_t i = 0; i < a.constraints_.size(); ++i) {
    if (!structurally_equal(*a.constraints_[i], *b.constraints_[i])) return false;
  }
  for (std::size_t i = 0; i < a.queries_.size(); ++i) {
    const auto& qa = a.queries_[i];
    const auto& qb = b.queries_[i];
    if (qa.name != qb.name || qa.free_var != qb.free_var || !structurally_equal(*qa.formula, *qb.formula)) {
      return false;
    }
  }
  return true;
}

FormulaPtr axiom_formula(const Axiom& ax) {
  return make_forall("x", make_implies(make_atom(ax.antecedent_pred, Arg::variable("x"), Arg::constant(ax.antecedent_const)),
                                       make_atom(ax.consequent_pred, Arg::variable("x"), Arg::constant(ax.consequent_const))));
}

std::vector<FormulaPtr> ground_instantiations(const Axiom& ax, const KnowledgeBase& kb) {
  std::vector<FormulaPtr> out;
  out.reserve(kb.num_terms());
  for (TermId t : kb.domain()) {
    out.push_back(make_implies(make_atom(ax.antecedent_pred, Arg::constant(t), Arg::constant(ax.antecedent_const)),
                               make_atom(ax.consequent_pred, Arg::constant(t), Arg::constant(ax.consequent_const))));
  }
  return out;
}

std::string to_string(const Formula& f, const KnowledgeBase& kb) {
  std::vector<std::string> bound;
  return print(f, kb, bound, false);
}

std::string to_string(const Triple& t, const KnowledgeBase& kb) {
  return kb.name(t.pred) + "(" + kb.name(t.head) + ", " + kb.name(t.tail) + ")";
}

std::string to_string(const Axiom& a, const KnowledgeBase& kb) {
  return "forall x: " + kb.name(a.antecedent_pred) + "(x, " + kb.name(a.antecedent_const) + ") => " +
         kb.name(a.consequent_pred) + "(x, " + kb.name(a.consequent_const) + ")";
}

std::string print_kb(const KnowledgeBase& kb) {
  std::string out;
  for (const auto& t : kb.term_names()) out += "term " + t + ".\n";
  for (const auto& p : kb.predicate_names()) out += "pred " + p + ".\n";
  for (const auto& t : kb.triples()) out += to_string(t, kb) + ".\n";
  for (const auto& a : kb.axioms()) out += to_string(a, kb) + ".\n";
  for (const auto& c : kb.constraints()) out += to_string(*c, kb) + ".\n";
  for (const auto& q : kb.queries()) {
    out += "query " + q.name;
    if (q.free_var) out += "(?" + *q.free_var + ")";
    out += ": " + to_string(*q.formula, kb) + ".\n";
  }
  return out;
}

}  // namespace vsm
