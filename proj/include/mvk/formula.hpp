#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mvk {

// Immutable modal formula. Nodes are shared; copying is cheap and thread-safe.
class Formula {
 public:
  enum class Kind { Var, Top, Bot, Not, And, Or, Imp, Iff, Box, Dia };

  Formula() : Formula(top()) {}

  static Formula var(std::string name);
  static Formula top();
  static Formula bot();
  static Formula negate(Formula a);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula box(Formula a);
  static Formula dia(Formula a);

  Kind kind() const { return rep_->kind; }
  const std::string& name() const { return rep_->name; }  // Var only
  std::size_t arity() const { return rep_->kids.size(); }
  const Formula& child(std::size_t i = 0) const { return rep_->kids[i]; }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  struct Rep {
    Kind kind;
    std::string name;
    std::vector<Formula> kids;
  };
  explicit Formula(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Formula make(Kind kind, std::string name, std::vector<Formula> kids);
  std::shared_ptr<const Rep> rep_;
};

// An axiom template; its variables stand for arbitrary formulas.
struct AxiomScheme {
  std::string name;
  Formula templ;
};

// Grammar (ASCII, with unicode aliases):
//   formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" imp)? ;
//   or := and ("|" and)* ; and := unary ("&" unary)* ;
//   unary := ("~" | "[]" | "<>") unary | atom ;
//   atom := "true" | "false" | ident | "(" formula ")".
// "->" associates right, "<->" folds left. Throws ParseError with position.
Formula parse_formula(const std::string& text);

// Canonical fully parenthesised rendering; parse_formula round-trips it.
std::string render_formula(const Formula& f);

// Replaces every variable of `scheme.templ` by its image. Every variable
// must be bound (DomainError::Kind::MissingBinding otherwise).
Formula substitute(const AxiomScheme& scheme,
                   const std::map<std::string, Formula>& binding);

// Distinct subtrees of f (f included), post-order, first occurrence wins.
std::vector<Formula> subformulas(const Formula& f);

// Variable names, sorted, without duplicates.
std::vector<std::string> variables(const Formula& f);

// Deepest nesting of [] / <>.
uint32_t modal_depth(const Formula& f);

}  // namespace mvk
