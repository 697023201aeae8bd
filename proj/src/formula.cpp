#include "mvk/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mvk/errors.hpp"

namespace mvk {

Formula Formula::make(Kind kind, std::string name, std::vector<Formula> kids) {
  auto rep = std::make_shared<Rep>();
  rep->kind = kind;
  rep->name = std::move(name);
  rep->kids = std::move(kids);
  return Formula(std::move(rep));
}

Formula Formula::var(std::string name) {
  return make(Kind::Var, std::move(name), {});
}
Formula Formula::top() { return make(Kind::Top, "", {}); }
Formula Formula::bot() { return make(Kind::Bot, "", {}); }
Formula Formula::negate(Formula a) {
  return make(Kind::Not, "", {std::move(a)});
}
Formula Formula::conj(Formula a, Formula b) {
  return make(Kind::And, "", {std::move(a), std::move(b)});
}
Formula Formula::disj(Formula a, Formula b) {
  return make(Kind::Or, "", {std::move(a), std::move(b)});
}
Formula Formula::implies(Formula a, Formula b) {
  return make(Kind::Imp, "", {std::move(a), std::move(b)});
}
Formula Formula::iff(Formula a, Formula b) {
  return make(Kind::Iff, "", {std::move(a), std::move(b)});
}
Formula Formula::box(Formula a) { return make(Kind::Box, "", {std::move(a)}); }
Formula Formula::dia(Formula a) { return make(Kind::Dia, "", {std::move(a)}); }

bool Formula::operator==(const Formula& o) const {
  if (rep_ == o.rep_) return true;
  if (rep_->kind != o.rep_->kind) return false;
  if (rep_->name != o.rep_->name) return false;
  if (rep_->kids.size() != o.rep_->kids.size()) return false;
  for (std::size_t i = 0; i < rep_->kids.size(); ++i)
    if (rep_->kids[i] != o.rep_->kids[i]) return false;
  return true;
}

namespace {

enum class Tok {
  End,
  LParen,
  RParen,
  Not,
  Box,
  Dia,
  And,
  Or,
  Imp,
  Iff,
  True,
  False,
  Ident,
};

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  Tok tok = Tok::End;
  std::size_t tok_pos = 0;
  std::string ident;

  explicit Lexer(const std::string& t) : text(t) { advance(); }

  bool accept_str(const char* s) {
    std::size_t n = std::char_traits<char>::length(s);
    if (text.compare(pos, n, s) == 0) {
      pos += n;
      return true;
    }
    return false;
  }

  void advance() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
            text[pos] == '\r'))
      ++pos;
    tok_pos = pos;
    if (pos >= text.size()) {
      tok = Tok::End;
      return;
    }
    // Multi-char operators first; unicode aliases are matched as raw UTF-8.
    if (accept_str("<->") || accept_str("↔")) { tok = Tok::Iff; return; }
    if (accept_str("->") || accept_str("→")) { tok = Tok::Imp; return; }
    if (accept_str("[]") || accept_str("□")) { tok = Tok::Box; return; }
    if (accept_str("<>") || accept_str("◇")) { tok = Tok::Dia; return; }
    if (accept_str("~") || accept_str("¬")) { tok = Tok::Not; return; }
    if (accept_str("&") || accept_str("∧")) { tok = Tok::And; return; }
    if (accept_str("|") || accept_str("∨")) { tok = Tok::Or; return; }
    if (accept_str("⊤")) { tok = Tok::True; return; }
    if (accept_str("⊥")) { tok = Tok::False; return; }
    if (accept_str("(")) { tok = Tok::LParen; return; }
    if (accept_str(")")) { tok = Tok::RParen; return; }
    char c = text[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '_'))
        ++pos;
      ident = text.substr(start, pos - start);
      if (ident == "true")
        tok = Tok::True;
      else if (ident == "false")
        tok = Tok::False;
      else
        tok = Tok::Ident;
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos);
  }
};

struct Parser {
  Lexer lex;

  explicit Parser(const std::string& t) : lex(t) {}

  Formula parse() {
    Formula f = parse_iff();
    if (lex.tok != Tok::End)
      throw ParseError("trailing input after formula", lex.tok_pos);
    return f;
  }

  Formula parse_iff() {
    Formula f = parse_imp();
    while (lex.tok == Tok::Iff) {
      lex.advance();
      f = Formula::iff(std::move(f), parse_imp());
    }
    return f;
  }

  Formula parse_imp() {
    Formula f = parse_or();
    if (lex.tok == Tok::Imp) {
      lex.advance();
      return Formula::implies(std::move(f), parse_imp());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex.tok == Tok::Or) {
      lex.advance();
      f = Formula::disj(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (lex.tok == Tok::And) {
      lex.advance();
      f = Formula::conj(std::move(f), parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    switch (lex.tok) {
      case Tok::Not:
        lex.advance();
        return Formula::negate(parse_unary());
      case Tok::Box:
        lex.advance();
        return Formula::box(parse_unary());
      case Tok::Dia:
        lex.advance();
        return Formula::dia(parse_unary());
      default:
        return parse_atom();
    }
  }

  Formula parse_atom() {
    switch (lex.tok) {
      case Tok::True:
        lex.advance();
        return Formula::top();
      case Tok::False:
        lex.advance();
        return Formula::bot();
      case Tok::Ident: {
        Formula f = Formula::var(lex.ident);
        lex.advance();
        return f;
      }
      case Tok::LParen: {
        lex.advance();
        Formula f = parse_iff();
        if (lex.tok != Tok::RParen)
          throw ParseError("expected ')'", lex.tok_pos);
        lex.advance();
        return f;
      }
      default:
        throw ParseError("expected a formula", lex.tok_pos);
    }
  }
};

void render(const Formula& f, std::string& out) {
  auto paren = [&out](const Formula& g) {
    out += '(';
    render(g, out);
    out += ')';
  };
  switch (f.kind()) {
    case Formula::Kind::Var: out += f.name(); return;
    case Formula::Kind::Top: out += "true"; return;
    case Formula::Kind::Bot: out += "false"; return;
    case Formula::Kind::Not: out += '~'; paren(f.child()); return;
    case Formula::Kind::Box: out += "[]"; paren(f.child()); return;
    case Formula::Kind::Dia: out += "<>"; paren(f.child()); return;
    case Formula::Kind::And:
      paren(f.child(0)); out += " & "; paren(f.child(1)); return;
    case Formula::Kind::Or:
      paren(f.child(0)); out += " | "; paren(f.child(1)); return;
    case Formula::Kind::Imp:
      paren(f.child(0)); out += " -> "; paren(f.child(1)); return;
    case Formula::Kind::Iff:
      paren(f.child(0)); out += " <-> "; paren(f.child(1)); return;
  }
}

Formula substitute_rec(const Formula& f,
                       const std::map<std::string, Formula>& binding) {
  switch (f.kind()) {
    case Formula::Kind::Var: {
      auto it = binding.find(f.name());
      if (it == binding.end())
        throw DomainError(DomainError::Kind::MissingBinding,
                          "no image for template variable '" + f.name() + "'");
      return it->second;
    }
    case Formula::Kind::Top:
    case Formula::Kind::Bot:
      return f;
    case Formula::Kind::Not:
      return Formula::negate(substitute_rec(f.child(), binding));
    case Formula::Kind::Box:
      return Formula::box(substitute_rec(f.child(), binding));
    case Formula::Kind::Dia:
      return Formula::dia(substitute_rec(f.child(), binding));
    case Formula::Kind::And:
      return Formula::conj(substitute_rec(f.child(0), binding),
                           substitute_rec(f.child(1), binding));
    case Formula::Kind::Or:
      return Formula::disj(substitute_rec(f.child(0), binding),
                           substitute_rec(f.child(1), binding));
    case Formula::Kind::Imp:
      return Formula::implies(substitute_rec(f.child(0), binding),
                              substitute_rec(f.child(1), binding));
    case Formula::Kind::Iff:
      return Formula::iff(substitute_rec(f.child(0), binding),
                          substitute_rec(f.child(1), binding));
  }
  throw Error("unreachable");
}

void collect_subformulas(const Formula& f, std::set<std::string>& seen,
                         std::vector<Formula>& out) {
  for (std::size_t i = 0; i < f.arity(); ++i)
    collect_subformulas(f.child(i), seen, out);
  if (seen.insert(render_formula(f)).second) out.push_back(f);
}

}  // namespace

Formula parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string render_formula(const Formula& f) {
  std::string out;
  render(f, out);
  return out;
}

Formula substitute(const AxiomScheme& scheme,
                   const std::map<std::string, Formula>& binding) {
  return substitute_rec(scheme.templ, binding);
}

std::vector<Formula> subformulas(const Formula& f) {
  std::set<std::string> seen;
  std::vector<Formula> out;
  collect_subformulas(f, seen, out);
  return out;
}

std::vector<std::string> variables(const Formula& f) {
  std::set<std::string> names;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (g.kind() == Formula::Kind::Var) names.insert(g.name());
    for (std::size_t i = 0; i < g.arity(); ++i) stack.push_back(g.child(i));
  }
  return {names.begin(), names.end()};
}

uint32_t modal_depth(const Formula& f) {
  uint32_t d = 0;
  for (std::size_t i = 0; i < f.arity(); ++i)
    d = std::max(d, modal_depth(f.child(i)));
  if (f.kind() == Formula::Kind::Box || f.kind() == Formula::Kind::Dia) ++d;
  return d;
}

}  // namespace mvk
