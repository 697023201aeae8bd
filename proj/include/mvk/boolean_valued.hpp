#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvk/fo_logic.hpp"
#include "mvk/limits.hpp"

namespace mvk {

// Finite Boolean algebra presented by its atoms; elements are masks
// over bits [0, atoms).
struct FiniteBooleanAlgebra {
  uint32_t atoms = 0;

  uint64_t top() const { return atoms >= 64 ? ~0ull : (1ull << atoms) - 1; }
  uint64_t complement(uint64_t a) const { return top() & ~a; }
  bool leq(uint64_t a, uint64_t b) const { return (a & ~b) == 0; }
  bool valid(uint64_t a) const { return (a & ~top()) == 0; }
};

// Ultrafilters on a finite algebra are principal at an atom.
struct Ultrafilter {
  uint32_t atom = 0;

  bool contains(uint64_t mask) const { return (mask >> atom) & 1; }
  static Ultrafilter principal(const FiniteBooleanAlgebra& algebra,
                               uint32_t atom);
  // Validates that members is exactly an ultrafilter; throws
  // DomainError(BadUltrafilter) otherwise.
  static Ultrafilter from_set(const FiniteBooleanAlgebra& algebra,
                              const std::vector<uint64_t>& members);
};

std::vector<Ultrafilter> all_ultrafilters(const FiniteBooleanAlgebra& algebra);

// Pairwise disjoint nonzero elements whose join is the top; for an
// atomic algebra, a partition of the atoms into blocks.
struct MaximalAntichain {
  std::vector<uint64_t> blocks;  // ordered by least atom

  // Index of the block containing the given atom.
  uint32_t block_of(uint32_t atom) const;
  static MaximalAntichain from_blocks(const FiniteBooleanAlgebra& algebra,
                                      std::vector<uint64_t> blocks);
};

// Every block of coarser is a union of blocks of finer.
bool refines(const MaximalAntichain& finer, const MaximalAntichain& coarser);

// All maximal antichains, i.e. all set partitions of the atoms,
// in restricted-growth-string order.
std::vector<MaximalAntichain> all_maximal_antichains(
    const FiniteBooleanAlgebra& algebra);

// Structure whose atomic statements carry algebra elements as truth
// values instead of booleans.
struct BValuedStructure {
  struct Relation {
    uint32_t arity = 0;
    std::vector<uint64_t> values;  // row-major over names^arity
  };

  FiniteBooleanAlgebra algebra;
  std::vector<std::string> names;
  std::vector<uint64_t> eq;  // row-major names x names
  std::map<std::string, Relation> relations;

  uint32_t name_count() const { return static_cast<uint32_t>(names.size()); }
  int name_index(const std::string& name) const;  // -1 if absent
  uint64_t eq_value(uint32_t a, uint32_t b) const;
  void set_eq(uint32_t a, uint32_t b, uint64_t value);  // sets both orders
  uint64_t rel_value(const std::string& rel,
                     const std::vector<uint32_t>& args) const;
  void set_rel(const std::string& rel, const std::vector<uint32_t>& args,
               uint64_t value);
  void add_relation(const std::string& rel, uint32_t arity);
};

// Truth value of f; env maps free variables to name indices, and
// quantifiers range over all names.
uint64_t boolean_value(const BValuedStructure& s, const FOFormula& f,
                       const std::map<std::string, uint32_t>& env);

// The laws a value assignment must satisfy before quotients make
// sense: reflexivity is top, symmetry, transitivity bounds, and
// substitution bounds for every relation coordinate.
struct EqualityLawReport {
  bool reflexive = true;
  bool symmetric = true;
  bool transitive = true;
  bool substitutive = true;
  std::vector<std::string> violations;  // human-readable witnesses

  bool ok() const {
    return reflexive && symmetric && transitive && substitutive;
  }
};

EqualityLawReport check_equality_laws(const BValuedStructure& s);

// Whether each existential truth value in the family is attained by a
// single witness name under every environment.
struct FullnessReport {
  bool full = true;
  uint64_t checked = 0;
  std::string witness;  // first existential with no single attaining name
};

FullnessReport check_fullness(const BValuedStructure& s,
                              const std::vector<FOFormula>& family);

// Two-valued collapse along an ultrafilter.
struct QuotientResult {
  ClassicalStructure structure;
  std::vector<uint32_t> class_of;  // name index -> element
};

// Requires the equality laws; throws DomainError(InvariantViolation)
// if they fail or a relation value depends on the representative.
QuotientResult quotient_by_ultrafilter(const BValuedStructure& s,
                                       const Ultrafilter& u);

// Agreement between "truth value lies in the ultrafilter" and truth in
// the quotient, over a formula family and all environments.
struct TransferReport {
  uint64_t checked = 0;
  uint64_t agreements = 0;
  std::vector<std::string> mismatches;  // up to a handful, rendered

  bool exact() const { return checked == agreements; }
};

TransferReport verify_los(const BValuedStructure& s, const Ultrafilter& u,
                          const std::vector<FOFormula>& family);

enum class UltrapowerMode { Quotient, AntichainLimit };

struct UltrapowerResult {
  ClassicalStructure structure;
  uint32_t name_count = 0;
  uint32_t antichains = 0;         // limit mode: family size
  bool embeddings_commute = true;  // limit mode diagnostics
  std::optional<std::vector<uint32_t>> iso_to_base;
};

// Names are all functions from atoms to base elements; equality and
// relation values are computed coordinatewise.
BValuedStructure full_name_structure(const ClassicalStructure& base,
                                     uint32_t atom_count,
                                     const Limits& limits = {});

// Quotient mode collapses the full name structure directly.
// AntichainLimit mode quotients the names constant on each antichain
// of the family, embeds along refinements, and returns the structure
// at the finest antichain; the family defaults to all maximal
// antichains and must be refinement-directed with a maximum
// (DomainError(NotRefinementDirected) otherwise).
UltrapowerResult boolean_ultrapower(
    const ClassicalStructure& base, uint32_t atom_count, const Ultrafilter& u,
    UltrapowerMode mode,
    const std::vector<MaximalAntichain>* family = nullptr,
    const Limits& limits = {});

// JSON codec. Schema:
//   {"atoms": k, "names": [...],
//    "eq": {"i,j": [atom indices]},
//    "relations": {"R": {"arity": m, "values": {"i,j": [atom indices]}}}}
// Missing eq entries default to top on the diagonal and bottom off it;
// missing relation entries default to bottom.
BValuedStructure bvalued_from_json(const std::string& text);
std::string bvalued_to_json(const BValuedStructure& s, bool pretty = false);

}  // namespace mvk
