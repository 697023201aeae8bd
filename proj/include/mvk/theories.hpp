#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvk/formula.hpp"
#include "mvk/kripke.hpp"

namespace mvk {

struct NamedAxiom {
  std::string name;
  AxiomScheme scheme;
};

// The thirteen axiom templates, in catalog order:
// K, Dual, S, 4, .2, 5, M, W5, .3, Dm, Grz, Lob, H.
const std::vector<NamedAxiom>& axiom_catalog();
const NamedAxiom& axiom_by_name(const std::string& name);

// A normal modal theory given by its axiom names; frame_class is set only
// where a standard finite frame correspondence backs the search.
struct ModalTheory {
  std::string name;
  std::vector<std::string> axioms;
  std::optional<FrameClass> frame_class;
};

// Fourteen theories: K, K4, S4, S4.2, S4.3, S4W5, S5, S4.1, S4.2.1,
// Dm, Dm.2, Grz, GL, K4H.
const std::vector<ModalTheory>& theory_catalog();
const ModalTheory& theory_by_name(const std::string& name);

struct Verdict {
  enum class Kind { Valid, Refuted, Unknown } kind;
  // Valid / Unknown
  uint32_t searched_bound = 0;
  bool complete = false;  // bound reached 2^|subformulas|, so Valid is final
  // Refuted
  KripkeModel model;
  uint32_t world = 0;
};

struct DecideOptions {
  // Report Unknown instead of an incomplete Valid when the bound is short of
  // the filtration threshold.
  bool unknown_on_incomplete = false;
  Limits limits;
};

// Searches every frame of the theory's class with at most `bound` worlds,
// all valuations, in enumeration order; the first counterexample is the
// lexicographically least one (world count, relation mask, valuation bits,
// world index). Requires theory.frame_class.
Verdict decide(const ModalTheory& theory, const Formula& f, uint32_t bound,
               const DecideOptions& opts = {});

// Smallest countermodel in the class, same ordering; the witness is
// re-checked with eval before being returned.
std::optional<std::pair<KripkeModel, uint32_t>> find_countermodel(
    FrameClass c, const Formula& f, uint32_t max_worlds,
    const Limits& limits = {});

// One edge of the theory inclusion diagram, stronger -> weaker.
struct DiagramEdge {
  std::string stronger;
  std::string weaker;
};
const std::vector<DiagramEdge>& theory_diagram();

struct EdgeCheck {
  DiagramEdge edge;
  bool inclusion_holds = false;    // every frame validating the stronger
                                   // theory's axioms validates the weaker's
  std::optional<Frame> strictness_witness;  // validates weaker, not stronger
};

struct DiagramReport {
  uint32_t max_worlds = 0;
  uint64_t frames_checked = 0;  // one representative per isomorphism class
  std::vector<EdgeCheck> edges;
  bool all_pass() const;
};

// Checks every diagram edge against all frames with <= max_worlds worlds
// (axiom-set validity inclusion), and hunts a strictness witness per edge.
DiagramReport verify_frame_inclusions(uint32_t max_worlds = 4,
                                      const Limits& limits = {});

}  // namespace mvk
