#include "mvk/formula_pool.hpp"

#include <algorithm>
#include <stdexcept>

namespace mvk {

Formula FormulaPool::to_formula(int32_t id,
                                const std::vector<std::string>& names) const {
  const Node& n = nodes[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::Var: return Formula::var(names[static_cast<std::size_t>(n.a)]);
    case Op::Top: return Formula::top();
    case Op::Not: return Formula::negate(to_formula(n.a, names));
    case Op::And:
      return Formula::conj(to_formula(n.a, names), to_formula(n.b, names));
    case Op::Or:
      return Formula::disj(to_formula(n.a, names), to_formula(n.b, names));
    case Op::Imp:
      return Formula::implies(to_formula(n.a, names), to_formula(n.b, names));
    case Op::Box: return Formula::box(to_formula(n.a, names));
    case Op::Dia: return Formula::dia(to_formula(n.a, names));
  }
  throw std::logic_error("unreachable");
}

FormulaPool generate_modal_family(uint32_t var_count, uint32_t max_nodes,
                                  uint32_t max_depth) {
  FormulaPool pool;
  pool.var_count = var_count;
  std::vector<uint32_t> depth;
  std::vector<std::vector<int32_t>> by_size(max_nodes + 1);

  auto add = [&](FormulaPool::Op op, int32_t a, int32_t b, uint32_t size,
                 uint32_t d) {
    int32_t id = static_cast<int32_t>(pool.nodes.size());
    pool.nodes.push_back({op, a, b});
    depth.push_back(d);
    by_size[size].push_back(id);
  };

  if (max_nodes >= 1) {
    add(FormulaPool::Op::Top, -1, -1, 1, 0);
    for (uint32_t v = 0; v < var_count; ++v)
      add(FormulaPool::Op::Var, static_cast<int32_t>(v), -1, 1, 0);
  }
  for (uint32_t s = 2; s <= max_nodes; ++s) {
    for (int32_t a : by_size[s - 1]) {
      add(FormulaPool::Op::Not, a, -1, s, depth[static_cast<std::size_t>(a)]);
      if (depth[static_cast<std::size_t>(a)] < max_depth) {
        add(FormulaPool::Op::Box, a, -1, s,
            depth[static_cast<std::size_t>(a)] + 1);
        add(FormulaPool::Op::Dia, a, -1, s,
            depth[static_cast<std::size_t>(a)] + 1);
      }
    }
    for (uint32_t sa = 1; sa + 2 <= s; ++sa) {
      uint32_t sb = s - 1 - sa;
      for (int32_t a : by_size[sa])
        for (int32_t b : by_size[sb]) {
          uint32_t d = std::max(depth[static_cast<std::size_t>(a)],
                                depth[static_cast<std::size_t>(b)]);
          add(FormulaPool::Op::And, a, b, s, d);
          add(FormulaPool::Op::Or, a, b, s, d);
          add(FormulaPool::Op::Imp, a, b, s, d);
        }
    }
  }
  return pool;
}

std::vector<uint64_t> eval_pool(const FormulaPool& pool,
                                const std::vector<uint64_t>& succ,
                                uint32_t worlds,
                                const std::vector<uint64_t>& var_masks) {
  uint64_t full = worlds >= 64 ? ~uint64_t{0}
                               : (uint64_t{1} << worlds) - 1;
  std::vector<uint64_t> out(pool.nodes.size(), 0);
  for (std::size_t i = 0; i < pool.nodes.size(); ++i) {
    const auto& n = pool.nodes[i];
    switch (n.op) {
      case FormulaPool::Op::Var:
        out[i] = var_masks[static_cast<std::size_t>(n.a)];
        break;
      case FormulaPool::Op::Top:
        out[i] = full;
        break;
      case FormulaPool::Op::Not:
        out[i] = ~out[static_cast<std::size_t>(n.a)] & full;
        break;
      case FormulaPool::Op::And:
        out[i] = out[static_cast<std::size_t>(n.a)] &
                 out[static_cast<std::size_t>(n.b)];
        break;
      case FormulaPool::Op::Or:
        out[i] = out[static_cast<std::size_t>(n.a)] |
                 out[static_cast<std::size_t>(n.b)];
        break;
      case FormulaPool::Op::Imp:
        out[i] = (~out[static_cast<std::size_t>(n.a)] & full) |
                 out[static_cast<std::size_t>(n.b)];
        break;
      case FormulaPool::Op::Box: {
        uint64_t m = out[static_cast<std::size_t>(n.a)];
        uint64_t r = 0;
        for (uint32_t w = 0; w < worlds; ++w)
          if ((succ[w] & ~m) == 0) r |= uint64_t{1} << w;
        out[i] = r;
        break;
      }
      case FormulaPool::Op::Dia: {
        uint64_t m = out[static_cast<std::size_t>(n.a)];
        uint64_t r = 0;
        for (uint32_t w = 0; w < worlds; ++w)
          if (succ[w] & m) r |= uint64_t{1} << w;
        out[i] = r;
        break;
      }
    }
  }
  return out;
}

}  // namespace mvk
