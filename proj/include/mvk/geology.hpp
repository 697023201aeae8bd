#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mvk {

// Directed family of worlds ordered by "is a ground of"; the relation
// must arrive transitive and acyclic (reflexive pairs are implied) and
// a ground's content must sit inside its extension's content.
struct MultiverseWorld {
  std::string id;
  std::set<std::string> content;
};

struct MultiverseGraph {
  std::vector<MultiverseWorld> worlds;
  std::vector<std::vector<bool>> ground;  // ground[u][v]: u grounds v

  uint32_t size() const { return static_cast<uint32_t>(worlds.size()); }
  int world_index(const std::string& id) const;  // -1 if absent
  std::vector<uint32_t> grounds_of(uint32_t v) const;
  std::vector<uint32_t> extensions_of(uint32_t v) const;
  std::set<std::string> mantle_of(uint32_t v) const;

  // Schema: {"worlds": [{"id": ..., "content": [...]}, ...],
  //          "ground": [[ground id, extension id], ...]}.
  static MultiverseGraph from_json(const std::string& text);
};

struct WorldAnalysis {
  uint32_t world = 0;
  std::vector<uint32_t> grounds;
  std::vector<uint32_t> extensions;
  std::vector<uint32_t> bedrocks;  // grounds that have no proper ground
  bool ground_axiom = false;       // no proper ground at all
  std::set<std::string> mantle;    // intersection over the grounds' contents
  std::optional<uint32_t> mantle_world;  // least world realizing the mantle
};

WorldAnalysis analyze_world(const MultiverseGraph& g, uint32_t v);

// Whether every two grounds of a world share a ground. Pairwise
// suffices here: a common ground of two grounds is again a ground of
// the same world, so finite families inherit a single bound.
struct DirectednessReport {
  bool holds_everywhere = true;
  std::vector<uint32_t> failing_worlds;
  std::optional<std::pair<uint32_t, uint32_t>> witness_pair;
  std::string note;
};

DirectednessReport check_downward_directed(const MultiverseGraph& g);

// Closure of a world under grounds and extensions, with the
// two-step question: is every member already a ground of some
// extension of the start?
struct GenericMultiverse {
  uint32_t start = 0;
  std::vector<uint32_t> members;  // ascending
  std::set<std::string> generic_mantle;
  bool two_step = true;
  std::vector<uint32_t> two_step_missing;
};

GenericMultiverse generic_multiverse(const MultiverseGraph& g, uint32_t v);

enum class MantleIterationOutcome { OuterCore, NotRealized, MaxIter };

struct MantleIteration {
  MantleIterationOutcome outcome = MantleIterationOutcome::OuterCore;
  std::vector<uint32_t> trace;  // start world, then each realizing world
  std::set<std::string> final_mantle;
};

// Repeatedly pass to the least-index world whose content equals the
// current mantle, until a world is its own mantle, the mantle is
// unrealized, or the budget runs out.
MantleIteration inner_mantles(const MultiverseGraph& g, uint32_t start,
                              uint32_t max_iter = 64);

// Family with the labels the closure principles quantify over. Ground
// cycles are permitted here: a finite family can only satisfy the
// principles with them.
struct EmbedRecord {
  std::string id;
  std::string from;
  std::string to;
  std::optional<std::string> iterate_of;
};

struct LabeledMultiverse {
  std::vector<std::string> worlds;
  std::vector<std::pair<uint32_t, uint32_t>> ground;
  std::vector<std::pair<uint32_t, uint32_t>> forcing_ext;
  std::vector<std::pair<uint32_t, uint32_t>> defines;
  std::vector<std::pair<uint32_t, uint32_t>> reflects;
  std::vector<std::pair<uint32_t, uint32_t>> countable_in;
  std::vector<std::pair<uint32_t, uint32_t>> illfounded_in;
  std::vector<std::pair<uint32_t, uint32_t>> absorbed_l;
  std::vector<EmbedRecord> embeds;

  int world_index(const std::string& id) const;

  // Schema: {"worlds": [...], "ground": [[a,b],...], "forcing_ext":
  // [...], "defines": [...], "reflects": [...], "countable_in": [...],
  // "illfounded_in": [...], "absorbed_L": [...], "embeds": [{"id":
  // ..., "from": ..., "to": ..., "iterate_of": ...}, ...]} with every
  // key but "worlds" optional.
  static LabeledMultiverse from_json(const std::string& text);
};

struct AxiomCheck {
  std::string axiom;
  bool pass = true;
  std::string witness;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  std::vector<std::string> notes;

  bool all_pass() const;
};

AxiomReport check_multiverse_axioms(const LabeledMultiverse& m);

}  // namespace mvk
