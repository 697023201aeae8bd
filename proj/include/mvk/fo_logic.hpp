#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mvk {

// First-order formula over equality and named relation symbols.
class FOFormula {
 public:
  enum class Kind { Eq, Rel, Not, And, Or, Imp, Exists, Forall };

  static FOFormula eq(std::string a, std::string b);
  static FOFormula rel(std::string name, std::vector<std::string> args);
  static FOFormula negate(FOFormula a);
  static FOFormula conj(FOFormula a, FOFormula b);
  static FOFormula disj(FOFormula a, FOFormula b);
  static FOFormula implies(FOFormula a, FOFormula b);
  static FOFormula exists(std::string var, FOFormula body);
  static FOFormula forall(std::string var, FOFormula body);

  Kind kind() const { return rep_->kind; }
  const std::string& rel_name() const { return rep_->name; }   // Rel
  const std::string& bound_var() const { return rep_->name; }  // Exists/Forall
  const std::vector<std::string>& args() const { return rep_->args; }
  const FOFormula& child(std::size_t i = 0) const { return rep_->kids[i]; }
  std::size_t arity() const { return rep_->kids.size(); }

  std::vector<std::string> free_variables() const;
  uint32_t quantifier_depth() const;

 private:
  struct Rep {
    Kind kind;
    std::string name;               // relation symbol or bound variable
    std::vector<std::string> args;  // Eq: {a,b}; Rel: argument variables
    std::vector<FOFormula> kids;
  };
  explicit FOFormula(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static FOFormula make(Kind kind, std::string name,
                        std::vector<std::string> args,
                        std::vector<FOFormula> kids);
  std::shared_ptr<const Rep> rep_;
};

// Grammar: formula := ("exists"|"forall") ident "." formula | imp ;
//   imp := or ("->" imp)? ; or := and ("|" and)* ; and := unary ("&" unary)* ;
//   unary := "~" unary | atom ;
//   atom := "(" formula ")" | ident "=" ident | ident "(" ident,... ")".
FOFormula parse_fo_formula(const std::string& text);
std::string render_fo_formula(const FOFormula& f);

// Finite relational structure with a plain universe {0..size-1}.
struct ClassicalStructure {
  struct Relation {
    uint32_t arity = 0;
    std::vector<bool> truth;  // row-major over universe^arity
  };
  uint32_t size = 0;
  std::map<std::string, Relation> relations;

  bool holds(const std::string& rel, const std::vector<uint32_t>& args) const;
  void set(const std::string& rel, const std::vector<uint32_t>& args,
           bool value = true);
  static ClassicalStructure with_relation(uint32_t size, const std::string& rel,
                                          uint32_t arity);
};

// Tarskian truth; env must cover the free variables.
bool classical_eval(const ClassicalStructure& s, const FOFormula& f,
                    const std::map<std::string, uint32_t>& env);

// JSON codec. Schema:
//   {"size": n, "relations": {"R": {"arity": m, "holds": [[args],...]}}}
ClassicalStructure classical_from_json(const std::string& text);
std::string classical_to_json(const ClassicalStructure& s);

// A bijection witnessing isomorphism, if one exists (search over
// permutations; universes this small only).
std::optional<std::vector<uint32_t>> find_isomorphism(
    const ClassicalStructure& a, const ClassicalStructure& b);

// Every formula over variables {x, y} whose node count stays within
// max_nodes and whose quantifier nesting stays within max_qdepth.
// Atoms: the four equalities and every relation applied to variable
// tuples. Ordered by node count, then construction order; deterministic.
std::vector<FOFormula> generate_fo_family(
    const std::map<std::string, uint32_t>& relation_arities,
    uint32_t max_nodes, uint32_t max_qdepth);

}  // namespace mvk
