#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvk/formula.hpp"

namespace mvk {

// Shared DAG of small modal formulas; every subformula is itself a pool
// member, so a family is evaluated bottom-up in one pass per model.
// Only for models with <= 64 worlds.
struct FormulaPool {
  enum class Op : uint8_t { Var, Top, Not, And, Or, Imp, Box, Dia };
  struct Node {
    Op op;
    int32_t a = -1;  // variable index for Var, else left child id
    int32_t b = -1;  // right child id for binary ops
  };

  std::vector<Node> nodes;  // children precede parents
  uint32_t var_count = 0;

  Formula to_formula(int32_t id, const std::vector<std::string>& names) const;
};

// Every formula over var_count variables and verum, built from
// ~ & | -> [] <>, with at most max_nodes AST nodes and modal depth
// <= max_depth. Deterministic construction order.
FormulaPool generate_modal_family(uint32_t var_count, uint32_t max_nodes,
                                  uint32_t max_depth);

// Truth mask per pool node. succ[w] is world w's successor mask,
// var_masks[i] the valuation of variable i; bit w = true at world w.
std::vector<uint64_t> eval_pool(const FormulaPool& pool,
                                const std::vector<uint64_t>& succ,
                                uint32_t worlds,
                                const std::vector<uint64_t>& var_masks);

}  // namespace mvk
