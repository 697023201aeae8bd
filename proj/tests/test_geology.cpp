#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mvk/errors.hpp"
#include "mvk/geology.hpp"

using namespace mvk;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/fixtures/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> strs(std::initializer_list<const char*> xs) {
  std::set<std::string> out;
  for (const char* x : xs) out.insert(x);
  return out;
}

}  // namespace

TEST_CASE("diamond: mantle realized at the bedrock") {
  MultiverseGraph g = MultiverseGraph::from_json(fixture("geo_diamond.json"));
  REQUIRE(g.size() == 4);  // g=0 a=1 b=2 t=3

  WorldAnalysis top = analyze_world(g, 3);
  CHECK(top.grounds == std::vector<uint32_t>{0, 1, 2, 3});
  CHECK(top.extensions == std::vector<uint32_t>{3});
  CHECK(top.bedrocks == std::vector<uint32_t>{0});
  CHECK(!top.ground_axiom);
  CHECK(top.mantle == strs({"a"}));
  REQUIRE(top.mantle_world.has_value());
  CHECK(*top.mantle_world == 0);

  WorldAnalysis bottom = analyze_world(g, 0);
  CHECK(bottom.ground_axiom);
  CHECK(bottom.grounds == std::vector<uint32_t>{0});
  CHECK(bottom.extensions == std::vector<uint32_t>{0, 1, 2, 3});
  CHECK(bottom.mantle == strs({"a"}));

  DirectednessReport dir = check_downward_directed(g);
  CHECK(dir.holds_everywhere);
  CHECK(dir.failing_worlds.empty());
  CHECK(!dir.note.empty());

  MantleIteration it = inner_mantles(g, 3);
  CHECK(it.outcome == MantleIterationOutcome::OuterCore);
  CHECK(it.trace == std::vector<uint32_t>{3, 0});
  CHECK(it.final_mantle == strs({"a"}));

  GenericMultiverse gm = generic_multiverse(g, 3);
  CHECK(gm.members == std::vector<uint32_t>{0, 1, 2, 3});
  CHECK(gm.two_step);
  CHECK(gm.two_step_missing.empty());
  CHECK(gm.generic_mantle == strs({"a"}));
  // Directedness everywhere: the generic mantle equals the mantle.
  CHECK(gm.generic_mantle == top.mantle);
}

TEST_CASE("fork: no common ground, unrealized mantle, two-step failure") {
  MultiverseGraph g = MultiverseGraph::from_json(fixture("geo_fork.json"));
  REQUIRE(g.size() == 4);  // a=0 b=1 w=2 x=3

  DirectednessReport dir = check_downward_directed(g);
  CHECK(!dir.holds_everywhere);
  CHECK(dir.failing_worlds == std::vector<uint32_t>{2});
  REQUIRE(dir.witness_pair.has_value());
  CHECK(*dir.witness_pair == std::pair<uint32_t, uint32_t>{0, 1});

  WorldAnalysis w = analyze_world(g, 2);
  CHECK(w.grounds == std::vector<uint32_t>{0, 1, 2});
  CHECK(w.bedrocks == std::vector<uint32_t>{0, 1});
  CHECK(w.mantle.empty());
  CHECK(!w.mantle_world.has_value());

  MantleIteration it = inner_mantles(g, 2);
  CHECK(it.outcome == MantleIterationOutcome::NotRealized);
  CHECK(it.trace == std::vector<uint32_t>{2});
  CHECK(it.final_mantle.empty());

  GenericMultiverse gm = generic_multiverse(g, 2);
  CHECK(gm.members == std::vector<uint32_t>{0, 1, 2, 3});
  CHECK(!gm.two_step);
  CHECK(gm.two_step_missing == std::vector<uint32_t>{3});
  CHECK(gm.generic_mantle.empty());
}

TEST_CASE("chain: two iteration steps reach the outer core") {
  MultiverseGraph g = MultiverseGraph::from_json(fixture("geo_chain.json"));
  MantleIteration it = inner_mantles(g, 2);
  CHECK(it.outcome == MantleIterationOutcome::OuterCore);
  CHECK(it.trace == std::vector<uint32_t>{2, 0});
  CHECK(it.final_mantle == strs({"m"}));

  WorldAnalysis mid = analyze_world(g, 1);
  CHECK(mid.grounds == std::vector<uint32_t>{0, 1});
  CHECK(mid.bedrocks == std::vector<uint32_t>{0});
  CHECK(mid.mantle == strs({"m"}));

  // The iteration budget can cut the loop short.
  MantleIteration capped = inner_mantles(g, 2, 0);
  CHECK(capped.outcome == MantleIterationOutcome::MaxIter);
}

TEST_CASE("singleton ground axiom world") {
  MultiverseGraph g =
      MultiverseGraph::from_json(fixture("geo_ga_singleton.json"));
  WorldAnalysis s = analyze_world(g, 0);
  CHECK(s.ground_axiom);
  CHECK(s.bedrocks == std::vector<uint32_t>{0});
  WorldAnalysis e = analyze_world(g, 1);
  CHECK(!e.ground_axiom);
  CHECK(e.bedrocks == std::vector<uint32_t>{0});
  CHECK(e.mantle == strs({"z"}));

  MantleIteration it = inner_mantles(g, 1);
  CHECK(it.outcome == MantleIterationOutcome::OuterCore);
  CHECK(it.trace == std::vector<uint32_t>{1, 0});
}

TEST_CASE("cube: the full subset lattice is everywhere directed") {
  MultiverseGraph g = MultiverseGraph::from_json(fixture("geo_cube8.json"));
  REQUIRE(g.size() == 8);  // e a b c ab ac bc abc

  CHECK(check_downward_directed(g).holds_everywhere);

  int top = g.world_index("abc");
  REQUIRE(top >= 0);
  WorldAnalysis t = analyze_world(g, top);
  CHECK(t.grounds.size() == 8);
  CHECK(t.bedrocks == std::vector<uint32_t>{0});
  CHECK(t.mantle == strs({"o"}));

  GenericMultiverse gm = generic_multiverse(g, g.world_index("a"));
  CHECK(gm.members.size() == 8);
  CHECK(gm.two_step);
  CHECK(gm.generic_mantle == strs({"o"}));

  MantleIteration it = inner_mantles(g, top);
  CHECK(it.outcome == MantleIterationOutcome::OuterCore);
  CHECK(it.trace == std::vector<uint32_t>{7, 0});
}

TEST_CASE("world ids are labels: relabeling preserves the analysis") {
  // The diamond with worlds listed top-first.
  MultiverseGraph g = MultiverseGraph::from_json(R"({
    "worlds": [
      {"id": "t", "content": ["a", "b", "c"]},
      {"id": "b", "content": ["a", "c"]},
      {"id": "a", "content": ["a", "b"]},
      {"id": "g", "content": ["a"]}
    ],
    "ground": [["g","a"],["g","b"],["g","t"],["a","t"],["b","t"]]
  })");
  WorldAnalysis top = analyze_world(g, 0);
  CHECK(top.mantle == strs({"a"}));
  REQUIRE(top.mantle_world.has_value());
  CHECK(*top.mantle_world == 3);

  MantleIteration it = inner_mantles(g, 0);
  CHECK(it.outcome == MantleIterationOutcome::OuterCore);
  CHECK(it.trace == std::vector<uint32_t>{0, 3});
}

TEST_CASE("graph validation rejects malformed input") {
  auto load = [](const char* text) { return MultiverseGraph::from_json(text); };

  CHECK_THROWS_AS(load(R"({"worlds": [{"id": "a", "content": []},
                                      {"id": "a", "content": []}]})"),
                  DomainError);
  CHECK_THROWS_AS(load(R"({"worlds": [{"id": "a", "content": []}],
                           "ground": [["a", "zz"]]})"),
                  DomainError);

  auto message_of = [&](const char* text) -> std::string {
    try {
      MultiverseGraph::from_json(text);
    } catch (const DomainError& e) {
      return e.what();
    }
    return "";
  };

  // Mutual grounds with equal content: an order cycle.
  std::string cyc = message_of(R"({
    "worlds": [{"id": "m1", "content": ["z"]}, {"id": "m2", "content": ["z"]}],
    "ground": [["m1", "m2"], ["m2", "m1"]]})");
  CHECK(cyc.find("ground cycle") != std::string::npos);

  // (a,b) and (b,c) without (a,c).
  std::string tr = message_of(R"({
    "worlds": [{"id": "a", "content": []},
               {"id": "b", "content": ["x"]},
               {"id": "c", "content": ["x", "y"]}],
    "ground": [["a", "b"], ["b", "c"]]})");
  CHECK(tr.find("not transitive") != std::string::npos);

  // A ground whose content leaks outside its extension.
  std::string mono = message_of(R"({
    "worlds": [{"id": "a", "content": ["s"]}, {"id": "b", "content": ["t"]}],
    "ground": [["a", "b"]]})");
  CHECK(mono.find("outside its extension") != std::string::npos);
}

TEST_CASE("closure principles on the labeled families") {
  AxiomReport good = check_multiverse_axioms(
      LabeledMultiverse::from_json(fixture("labeled_good.json")));
  CHECK(good.all_pass());
  REQUIRE(good.checks.size() == 7);
  const char* expected[] = {"realizability",          "forcing-extension",
                            "reflection",             "countability",
                            "wellfoundedness-mirage", "reverse-embedding",
                            "absorption"};
  for (std::size_t i = 0; i < 7; ++i) CHECK(good.checks[i].axiom == expected[i]);
  CHECK(good.notes.size() == 2);

  AxiomReport cyc = check_multiverse_axioms(
      LabeledMultiverse::from_json(fixture("labeled_cycle.json")));
  CHECK(cyc.all_pass());

  AxiomReport bad = check_multiverse_axioms(
      LabeledMultiverse::from_json(fixture("labeled_bad.json")));
  CHECK(!bad.all_pass());
  auto check_of = [&](const char* axiom) -> const AxiomCheck& {
    for (const auto& c : bad.checks)
      if (c.axiom == axiom) return c;
    static AxiomCheck none;
    return none;
  };
  CHECK(check_of("realizability").pass);
  CHECK(!check_of("forcing-extension").pass);
  CHECK(check_of("forcing-extension").witness ==
        "forcing extension u -> w is not a ground pair");
  CHECK(!check_of("reflection").pass);
  CHECK(check_of("reflection").witness == "no witness for world v");
  CHECK(check_of("countability").pass);
  CHECK(!check_of("wellfoundedness-mirage").pass);
  CHECK(!check_of("reverse-embedding").pass);
  CHECK(check_of("reverse-embedding").witness ==
        "embedding j0 is not an iterate of anything");
  CHECK(check_of("absorption").pass);
}

TEST_CASE("embeds referencing unknown records fail the reverse check") {
  LabeledMultiverse m = LabeledMultiverse::from_json(R"({
    "worlds": ["a"],
    "forcing_ext": [["a", "a"]],
    "embeds": [{"id": "j", "from": "a", "to": "a", "iterate_of": "zz"}]
  })");
  AxiomReport rep = check_multiverse_axioms(m);
  for (const auto& c : rep.checks)
    if (c.axiom == "reverse-embedding") {
      CHECK(!c.pass);
      CHECK(c.witness == "embedding j iterates the unknown record zz");
    }
}

TEST_CASE("labeled loader validation") {
  CHECK_THROWS_AS(LabeledMultiverse::from_json(R"({"worlds": []})"),
                  DomainError);
  CHECK_THROWS_AS(LabeledMultiverse::from_json(R"({"worlds": ["a"],
      "ground": [["a", "zz"]]})"),
                  DomainError);
  CHECK_THROWS_AS(LabeledMultiverse::from_json(R"({"worlds": ["a"],
      "embeds": [{"id": "j", "from": "a", "to": "a"},
                 {"id": "j", "from": "a", "to": "a"}]})"),
                  DomainError);
  CHECK_THROWS_AS(LabeledMultiverse::from_json(R"({"worlds": ["a"],
      "embeds": [{"id": "j", "from": "zz", "to": "a"}]})"),
                  DomainError);
}
