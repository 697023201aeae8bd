#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mvk {

// Forcing-style partial order: leq(q, p) means q is a stronger
// condition than p. Construction closes the given pairs reflexively
// and transitively, then rejects cycles between distinct conditions.
struct Poset {
  std::vector<std::string> conditions;
  std::vector<std::vector<bool>> leq;

  uint32_t size() const { return static_cast<uint32_t>(conditions.size()); }
  static Poset from_pairs(std::vector<std::string> conditions,
                          const std::vector<std::pair<uint32_t, uint32_t>>& pairs);
};

struct DensityReport {
  bool dense = true;
  std::optional<uint32_t> witness;  // condition with no extension in the set
};

DensityReport is_dense(const Poset& p, const std::vector<uint32_t>& set);

struct GenericFilterResult {
  std::vector<uint32_t> chain;   // descending conditions, weakest first
  std::vector<uint32_t> filter;  // upward closure of the chain, ascending
  bool upward_closed = true;
  bool downward_directed = true;
  std::vector<bool> meets;  // one entry per dense set

  bool ok() const;
};

// Deterministic filter construction: start at the least-index weakest
// condition, then repeatedly extend into each dense set in turn,
// picking the least-index extension. Each set must be dense
// (DomainError(NotDense) with the stuck condition otherwise).
GenericFilterResult build_generic_filter(
    const Poset& p, const std::vector<std::vector<uint32_t>>& dense_sets);

// Schema: {"conditions": [...], "leq": [[i,j],...],
//          "dense": [[indices],...]} with "dense" optional.
struct PosetSpec {
  Poset poset;
  std::vector<std::vector<uint32_t>> dense_sets;
};

PosetSpec poset_from_json(const std::string& text);

}  // namespace mvk
