#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mvk/bitset.hpp"
#include "mvk/formula.hpp"
#include "mvk/limits.hpp"

namespace mvk {

// Finite accessibility structure; succ[w] is the set of worlds w reaches.
struct Frame {
  uint32_t worlds = 0;
  std::vector<WorldSet> succ;

  Frame() = default;
  explicit Frame(uint32_t n) : worlds(n), succ(n, WorldSet(n)) {}

  bool edge(uint32_t a, uint32_t b) const { return succ[a].test(b); }
  void add_edge(uint32_t a, uint32_t b) { succ[a].set(b); }

  // Row-major encoding, bit a*worlds+b <=> edge (a,b). Only for worlds <= 8.
  uint64_t relation_mask() const;
  static Frame from_relation_mask(uint32_t worlds, uint64_t mask);

  std::vector<std::pair<uint32_t, uint32_t>> edge_list() const;
  bool operator==(const Frame&) const = default;
};

// Frame plus a total valuation for a declared variable set.
struct KripkeModel {
  Frame frame;
  std::vector<std::string> vars;
  std::vector<WorldSet> truth;  // truth[i] = worlds where vars[i] holds

  KripkeModel() = default;
  KripkeModel(Frame f, std::vector<std::string> names);

  int var_index(const std::string& name) const;  // -1 when undeclared
  void set_true(const std::string& var, uint32_t world);
};

enum class FrameClass {
  Preorder,
  DirectedPreorder,
  PreLattice,
  PreBooleanAlgebra,
  LinearPreorder,
  Total,
  Transitive,
  TransitiveIrreflexive,
  Arbitrary,
};

const char* frame_class_name(FrameClass c);
std::optional<FrameClass> frame_class_from_name(const std::string& name);

// Worlds of m where f holds. Unknown variables raise
// DomainError::Kind::UnknownVariable.
WorldSet eval_set(const KripkeModel& m, const Formula& f);
bool eval(const KripkeModel& m, uint32_t world, const Formula& f);

// True when f holds at every world under every valuation of its variables.
// The sweep is 2^(worlds * vars); beyond limits.max_valuation_bits it raises
// CapExceeded.
bool valid_on_frame(const Frame& fr, const Formula& f,
                    const Limits& limits = {});

bool frame_in_class(const Frame& fr, FrameClass c);

// Every class predicate that holds, Arbitrary excluded as trivially true.
std::set<FrameClass> classify_frame(const Frame& fr);

// Clusters of mutually accessible worlds, ordered by least member.
// Requires a preorder (DomainError::Kind::NotAPreorder otherwise).
struct ClusterPoset {
  uint32_t clusters = 0;
  std::vector<std::vector<uint32_t>> members;
  std::vector<uint32_t> cluster_of;            // world -> cluster
  std::vector<std::vector<bool>> leq;          // leq[a][b]: cluster a <= b
};
ClusterPoset quotient_poset(const Frame& fr);

bool poset_is_lattice(const ClusterPoset& q);
// When the cluster order is isomorphic to the full subset order on k atoms,
// yields each cluster's subset pattern (bit i = atom cluster i below it).
std::optional<std::vector<uint32_t>> powerset_pattern(const ClusterPoset& q);

// Visits every frame with 1..max_worlds worlds in class `c`, ordered by
// world count then ascending relation mask. With dedup_isomorphic, only
// relation masks that are minimal in their isomorphism orbit are visited.
// The visitor returns false to stop early.
void enumerate_frames(uint32_t max_worlds, FrameClass c, bool dedup_isomorphic,
                      const std::function<bool(const Frame&)>& visitor,
                      const Limits& limits = {});
std::vector<Frame> enumerate_frames(uint32_t max_worlds, FrameClass c,
                                    bool dedup_isomorphic,
                                    const Limits& limits = {});

// JSON: {"worlds": n, "edges": [[i,j],...], "valuation": {"p": [w,...]}}
KripkeModel model_from_json(const std::string& text);
std::string model_to_json(const KripkeModel& m);

}  // namespace mvk
