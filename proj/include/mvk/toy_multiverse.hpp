#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvk/kripke.hpp"

namespace mvk {

// States are (pushed button set, switch assignment) pairs; a state reaches
// exactly the states whose button set extends its own. Atoms button_i and
// switch_j read off the two components.
struct ToyMultiverse {
  uint32_t buttons = 0;
  uint32_t switches = 0;
  KripkeModel model;

  uint32_t state_count() const { return uint32_t{1} << (buttons + switches); }
  uint32_t state_of(uint32_t button_mask, uint32_t switch_mask) const {
    return (button_mask << switches) | switch_mask;
  }
  uint32_t button_mask(uint32_t state) const { return state >> switches; }
  uint32_t switch_mask(uint32_t state) const {
    return state & ((uint32_t{1} << switches) - 1);
  }
  uint32_t root() const { return 0; }
};

ToyMultiverse make_multiverse(uint32_t buttons, uint32_t switches,
                              const Limits& limits = {});

// A statement is a predicate over states: an explicit state set, a formula
// over the multiverse atoms, or both (which must agree).
struct Statement {
  std::optional<WorldSet> states;
  std::optional<Formula> formula;

  WorldSet resolve(const ToyMultiverse& mv) const;
};

struct Classification {
  bool is_button = false;
  bool is_switch = false;
  bool is_negated_button = false;
  bool pushed = false;  // only meaningful when is_button

  bool labeled() const { return is_button || is_switch || is_negated_button; }
  std::vector<std::string> labels() const;
};

// button: necessarily possibly necessary; switch: necessarily toggleable
// both ways; pushed: additionally necessary at w.
Classification classify_statement(const ToyMultiverse& mv, const WorldSet& st,
                                  uint32_t world);

struct TrichotomyReport {
  uint64_t statements = 0;
  uint64_t buttons = 0;
  uint64_t switches = 0;
  uint64_t negated_buttons = 0;
  std::vector<uint64_t> unlabeled;  // state masks that earned no label
};

// Classifies every subset of the state space at `world`. State spaces above
// 16 states would need more than 2^16 statements and are rejected.
TrichotomyReport check_trichotomy(const ToyMultiverse& mv, uint32_t world,
                                  const Limits& limits = {});

// True when no button atom holds at `world` and, from every reachable state,
// each unpushed button can be pushed alone and each switch toggled alone
// (all other atoms unchanged).
bool check_independence(const KripkeModel& m,
                        const std::vector<std::string>& button_atoms,
                        const std::vector<std::string>& switch_atoms,
                        uint32_t world);
bool check_independence(const ToyMultiverse& mv, uint32_t world);

struct MaximalityRow {
  std::string label;
  bool holds = false;  // possibly-necessary implies necessary at w
};
struct MaximalityReport {
  uint64_t checked = 0;
  uint64_t failures = 0;
  std::vector<MaximalityRow> rows;  // per named statement, input order
};

MaximalityReport check_maximality(
    const ToyMultiverse& mv, uint32_t world,
    const std::vector<std::pair<std::string, Statement>>& family);

// Same check over every subset of the state space; keeps only counts plus a
// few failing state masks.
struct MaximalitySweep {
  uint64_t checked = 0;
  uint64_t failures = 0;
  std::vector<uint64_t> failing_examples;
};
MaximalitySweep check_maximality_all_statements(const ToyMultiverse& mv,
                                                uint32_t world,
                                                const Limits& limits = {});

// Variable translation produced by simulate_kripke_model.
struct Translation {
  std::vector<std::string> vars;
  std::vector<WorldSet> statements;     // statements[i] interprets vars[i]
  std::vector<uint32_t> state_of_world;
};

struct SimulationReport {
  uint64_t formulas_checked = 0;
  uint64_t discrepancies = 0;
  std::vector<std::string> examples;  // first few failing formulas, rendered
};

struct SimulationResult {
  ToyMultiverse mv;
  Translation translation;
  SimulationReport report;
};

struct SimulationOptions {
  uint32_t modal_depth = 3;
  uint32_t max_formula_nodes = 6;
  Limits limits;
};

// Embeds a model on a pre-Boolean-algebra frame into a toy multiverse with
// one button per lattice dimension and enough switches for the largest
// cluster; surplus switch patterns fold onto cluster members by index modulo
// cluster size. Verifies that every family formula keeps its truth value at
// every world under the embedding.
SimulationResult simulate_kripke_model(const KripkeModel& m, uint32_t world,
                                       const SimulationOptions& opts = {});

// The fold relation is a bisimulation for the translated atoms.
bool check_fold_bisimulation(const KripkeModel& m,
                             const SimulationResult& sim);

}  // namespace mvk
