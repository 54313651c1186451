#include "vsm/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace vsm {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

SemanticError::SemanticError(const std::string& what, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

enum class Tok {
  Ident,
  KwTerm,
  KwPred,
  KwQuery,
  KwForall,
  KwExists,
  KwNot,
  KwAnd,
  KwOr,
  LParen,
  RParen,
  Comma,
  Colon,
  Dot,
  Question,
  Arrow,
  End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word(src.substr(i, j - i));
      Tok kind = Tok::Ident;
      if (word == "term") kind = Tok::KwTerm;
      else if (word == "pred") kind = Tok::KwPred;
      else if (word == "query") kind = Tok::KwQuery;
      else if (word == "forall") kind = Tok::KwForall;
      else if (word == "exists") kind = Tok::KwExists;
      else if (word == "not") kind = Tok::KwNot;
      else if (word == "and") kind = Tok::KwAnd;
      else if (word == "or") kind = Tok::KwOr;
      out.push_back({kind, std::move(word), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '=' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Arrow, "=>", tl, tc});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case ':': kind = Tok::Colon; break;
      case '.': kind = Tok::Dot; break;
      case '?': kind = Tok::Question; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({kind, std::string(1, c), tl, tc});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, KnowledgeBase* mutable_kb, const KnowledgeBase& kb)
      : toks_(std::move(tokens)), mutable_kb_(mutable_kb), kb_(kb) {}

  bool at_end() const { return peek().kind == Tok::End; }
  const Token& peek() const { return toks_[pos_]; }

  // Whole-KB statements.
  void statement() {
    const Token& first = peek();
    switch (first.kind) {
      case Tok::KwTerm: {
        next();
        const Token& id = expect(Tok::Ident, "term name");
        expect(Tok::Dot, "'.'");
        declare_term(id);
        return;
      }
      case Tok::KwPred: {
        next();
        const Token& id = expect(Tok::Ident, "predicate name");
        expect(Tok::Dot, "'.'");
        declare_pred(id);
        return;
      }
      case Tok::KwQuery:
        mutable_kb_->add_query(query_statement());
        return;
      default:
        break;
    }
    free_seen_.clear();
    FormulaPtr f = formula();
    expect(Tok::Dot, "'.' at end of statement");
    if (!free_seen_.empty()) {
      throw SemanticError("free variable ?" + free_seen_.front() + " is only allowed in binding queries", first.line);
    }
    if (f->kind == FormulaKind::Atom && is_ground(*f)) {
      mutable_kb_->add_triple(Triple{f->pred, f->head.term, f->tail.term});
    } else if (f->kind == FormulaKind::Forall) {
      mutable_kb_->add_axiom(match_template(*f, first.line));
    } else if (is_ground(*f)) {
      mutable_kb_->add_constraint(f);
    } else {
      throw SemanticError("only triples, template axioms and ground formulas may be asserted", first.line);
    }
  }

  NamedQuery query_statement() {
    const Token& kw = expect(Tok::KwQuery, "'query'");
    const Token& name = expect(Tok::Ident, "query name");
    std::optional<std::string> marked;
    if (peek().kind == Tok::LParen) {
      next();
      expect(Tok::Question, "'?'");
      marked = expect(Tok::Ident, "variable name").text;
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Colon, "':'");
    free_seen_.clear();
    FormulaPtr f = formula();
    expect(Tok::Dot, "'.' at end of statement");
    return finish_query(name.text, f, marked, kw.line);
  }

  NamedQuery bare_query(std::string name) {
    int line = peek().line;
    free_seen_.clear();
    FormulaPtr f = formula();
    if (peek().kind == Tok::Dot) next();
    if (!at_end()) fail("unexpected " + describe(peek()) + " after formula");
    std::optional<std::string> marked;
    if (!free_seen_.empty()) marked = free_seen_.front();
    return finish_query(std::move(name), f, marked, line);
  }

 private:
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail("expected " + what + ", found " + describe(peek()));
    return next();
  }

  TermId declare_term(const Token& id) {
    if (mutable_kb_) return mutable_kb_->declare_term(id.text);
    if (auto t = kb_.find_term(id.text)) return *t;
    throw SemanticError("unknown term '" + id.text + "'", id.line);
  }

  PredId declare_pred(const Token& id) {
    if (mutable_kb_) return mutable_kb_->declare_predicate(id.text);
    if (auto p = kb_.find_predicate(id.text)) return *p;
    throw SemanticError("unknown predicate '" + id.text + "'", id.line);
  }

  NamedQuery finish_query(std::string name, FormulaPtr f, const std::optional<std::string>& marked, int line) {
    std::vector<std::string> distinct = free_seen_;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() > 1) {
      throw SemanticError("query '" + name + "' has more than one free variable", line);
    }
    if (!distinct.empty() && (!marked || *marked != distinct.front())) {
      throw SemanticError("unbound variable ?" + distinct.front() + " in query '" + name + "'", line);
    }
    if (marked && distinct.empty()) {
      throw SemanticError("query '" + name + "' declares ?" + *marked + " but never uses it", line);
    }
    return NamedQuery{std::move(name), std::move(f), marked};
  }

  Axiom match_template(const Formula& f, int line) const {
    const Formula& body = *f.left;
    auto atom_over_var = [&](const Formula& a) {
      return a.kind == FormulaKind::Atom && a.head.is_variable() && a.head.var == f.var && !a.tail.is_variable();
    };
    if (body.kind != FormulaKind::Implies || !atom_over_var(*body.left) || !atom_over_var(*body.right)) {
      throw SemanticError("axiom does not match the template 'forall x: P(x, A) => Q(x, B)'", line);
    }
    return Axiom{body.left->pred, body.left->tail.term, body.right->pred, body.right->tail.term};
  }

  // formula := disjunction ['=>' formula]
  FormulaPtr formula() {
    FormulaPtr lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      next();
      return make_implies(std::move(lhs), formula());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (peek().kind == Tok::KwOr) {
      next();
      lhs = make_or(std::move(lhs), conjunction());
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = unary();
    while (peek().kind == Tok::KwAnd) {
      next();
      lhs = make_and(std::move(lhs), unary());
    }
    return lhs;
  }

  FormulaPtr unary() {
    switch (peek().kind) {
      case Tok::KwNot:
        next();
        return make_not(unary());
      case Tok::KwForall:
      case Tok::KwExists: {
        bool universal = next().kind == Tok::KwForall;
        std::string var = expect(Tok::Ident, "quantified variable").text;
        expect(Tok::Colon, "':' after quantified variable");
        bound_.push_back(var);
        FormulaPtr body = formula();
        bound_.pop_back();
        return universal ? make_forall(std::move(var), std::move(body)) : make_exists(std::move(var), std::move(body));
      }
      case Tok::LParen: {
        next();
        FormulaPtr inner = formula();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return atom();
      default:
        fail("expected a formula, found " + describe(peek()));
    }
  }

  FormulaPtr atom() {
    const Token& pred_tok = next();
    int line = pred_tok.line;
    int column = pred_tok.column;
    PredId p = declare_pred(pred_tok);
    expect(Tok::LParen, "'(' after predicate " + pred_tok.text);
    std::vector<Arg> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(argument());
      while (peek().kind == Tok::Comma) {
        next();
        args.push_back(argument());
      }
    }
    expect(Tok::RParen, "')' closing the argument list");
    if (args.size() != 2) {
      throw ParseError("predicate " + pred_tok.text + " is binary but was given " + std::to_string(args.size()) +
                           " argument(s)",
                       line, column);
    }
    return make_atom(p, std::move(args[0]), std::move(args[1]));
  }

  Arg argument() {
    if (peek().kind == Tok::Question) {
      next();
      const Token& id = expect(Tok::Ident, "variable name after '?'");
      if (std::find(bound_.begin(), bound_.end(), id.text) != bound_.end()) {
        throw SemanticError("free variable ?" + id.text + " is shadowed by a quantifier", id.line);
      }
      free_seen_.push_back(id.text);
      return Arg::variable(id.text);
    }
    const Token& id = expect(Tok::Ident, "term or variable");
    if (std::find(bound_.begin(), bound_.end(), id.text) != bound_.end()) return Arg::variable(id.text);
    return Arg::constant(declare_term(id));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  KnowledgeBase* mutable_kb_;
  const KnowledgeBase& kb_;
  std::vector<std::string> bound_;
  std::vector<std::string> free_seen_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
  KnowledgeBase kb;
  Parser parser(lex(text), &kb, kb);
  while (!parser.at_end()) {
    int line = parser.peek().line;
    try {
      parser.statement();
    } catch (const std::invalid_argument& e) {
      throw SemanticError(e.what(), line);
    }
  }
  return kb;
}

NamedQuery parse_query_formula(std::string_view text, const KnowledgeBase& kb) {
  Parser parser(lex(text), nullptr, kb);
  if (parser.peek().kind == Tok::KwQuery) {
    NamedQuery q = parser.query_statement();
    if (!parser.at_end()) throw ParseError("trailing input after query", parser.peek().line, parser.peek().column);
    return q;
  }
  return parser.bare_query("<query>");
}

std::vector<NamedQuery> parse_queries(std::string_view text, const KnowledgeBase& kb) {
  Parser parser(lex(text), nullptr, kb);
  std::vector<NamedQuery> out;
  while (!parser.at_end()) {
    NamedQuery q = parser.query_statement();
    for (const auto& existing : out) {
      if (existing.name == q.name) throw SemanticError("duplicate query name '" + q.name + "'", parser.peek().line);
    }
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace vsm
