#include "doctest.h"

#include <fstream>
#include <map>
#include <sstream>

#include "mvk/errors.hpp"
#include "mvk/theories.hpp"

using namespace mvk;

namespace {

std::string golden_path(const char* name) {
  return std::string(TEST_DATA_DIR) + "/golden/" + name;
}

Formula inst(const char* axiom, const char* p_image) {
  return substitute(axiom_by_name(axiom).scheme,
                    {{"p", parse_formula(p_image)},
                     {"q", parse_formula("q")}});
}

}  // namespace

TEST_CASE("axiom catalog matches the golden renderings") {
  std::ifstream in(golden_path("axioms.txt"));
  REQUIRE(in.good());
  std::map<std::string, std::string> golden;
  std::vector<std::string> order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto sep = line.find(" = ");
    REQUIRE(sep != std::string::npos);
    order.push_back(line.substr(0, sep));
    golden[line.substr(0, sep)] = line.substr(sep + 3);
  }

  const auto& catalog = axiom_catalog();
  REQUIRE(catalog.size() == 13);
  REQUIRE(golden.size() == 13);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    CHECK(catalog[i].name == order[i]);
    CHECK(render_formula(catalog[i].scheme.templ) == golden[catalog[i].name]);
  }
}

TEST_CASE("axiom lookup accepts the unicode spelling") {
  CHECK(axiom_by_name("Löb").name == "Lob");
  CHECK_THROWS_AS(axiom_by_name("XYZ"), DomainError);
}

TEST_CASE("theory catalog wiring") {
  const auto& theories = theory_catalog();
  REQUIRE(theories.size() == 14);

  auto axioms_of = [](const char* name) {
    return theory_by_name(name).axioms;
  };
  CHECK(axioms_of("K") == std::vector<std::string>{"K", "Dual"});
  CHECK(axioms_of("K4") == std::vector<std::string>{"K", "Dual", "4"});
  CHECK(axioms_of("S4") == std::vector<std::string>{"K", "Dual", "4", "S"});
  CHECK(axioms_of("S5") ==
        std::vector<std::string>{"K", "Dual", "4", "S", "5"});
  CHECK(axioms_of("GL") == std::vector<std::string>{"K", "Dual", "4", "Lob"});

  CHECK(theory_by_name("S4.2").frame_class == FrameClass::DirectedPreorder);
  CHECK(theory_by_name("S4.3").frame_class == FrameClass::LinearPreorder);
  CHECK(theory_by_name("S5").frame_class == FrameClass::Total);
  CHECK(theory_by_name("K").frame_class == FrameClass::Arbitrary);
  CHECK(theory_by_name("K4").frame_class == FrameClass::Transitive);
  CHECK(theory_by_name("GL").frame_class == FrameClass::TransitiveIrreflexive);
  CHECK(!theory_by_name("S4W5").frame_class.has_value());
  CHECK(!theory_by_name("Grz").frame_class.has_value());

  CHECK_THROWS_AS(theory_by_name("T9"), DomainError);
}

TEST_CASE("decide validates and refutes over the searched class") {
  const ModalTheory& s42 = theory_by_name("S4.2");

  Verdict valid = decide(s42, parse_formula("<>[]p -> []<>p"), 4);
  CHECK(valid.kind == Verdict::Kind::Valid);
  CHECK(valid.searched_bound == 4);
  CHECK(!valid.complete);

  // Frozen least counterexample: the reflexive 2-chain, p only at the top,
  // refuted at the root.
  Verdict refuted = decide(s42, parse_formula("<>[]p -> p"), 4);
  REQUIRE(refuted.kind == Verdict::Kind::Refuted);
  CHECK(refuted.model.frame.relation_mask() == 0b1011);
  CHECK(refuted.world == 0);
  REQUIRE(refuted.model.var_index("p") >= 0);
  CHECK(refuted.model.truth[0].test(1));
  CHECK(!refuted.model.truth[0].test(0));
  CHECK(!eval(refuted.model, refuted.world, parse_formula("<>[]p -> p")));

  Verdict unknown = decide(s42, parse_formula("<>[]p -> []<>p"), 2,
                           {.unknown_on_incomplete = true, .limits = {}});
  CHECK(unknown.kind == Verdict::Kind::Unknown);

  CHECK_THROWS_AS(decide(theory_by_name("Grz"), parse_formula("p"), 2),
                  DomainError);
}

TEST_CASE("decide is deterministic") {
  const ModalTheory& s4 = theory_by_name("S4");
  Formula f = parse_formula("p -> []p");
  Verdict a = decide(s4, f, 4);
  Verdict b = decide(s4, f, 4);
  REQUIRE(a.kind == Verdict::Kind::Refuted);
  CHECK(a.model.frame == b.model.frame);
  CHECK(a.world == b.world);
  CHECK(a.model.truth[0] == b.model.truth[0]);
}

TEST_CASE("countermodels exist for every non-S4.2 axiom on pre-lattices") {
  // On reflexive directed frames the S4.2 axioms hold; each remaining
  // template must fail somewhere with at most 4 worlds.
  for (const char* name : {"5", "M", "W5", ".3", "Dm", "Grz", "Lob", "H"}) {
    Formula f = axiom_by_name(name).scheme.templ;
    auto cm = find_countermodel(FrameClass::PreLattice, f, 4);
    REQUIRE_MESSAGE(cm.has_value(), name);
    CHECK(frame_in_class(cm->first.frame, FrameClass::PreLattice));
    CHECK(!eval(cm->first, cm->second, f));
  }
}

TEST_CASE("frozen countermodel shapes") {
  // Grz fails already on the total 2-frame with p at the bottom world.
  auto grz = find_countermodel(FrameClass::PreLattice,
                               axiom_by_name("Grz").scheme.templ, 4);
  REQUIRE(grz.has_value());
  CHECK(grz->first.frame.relation_mask() == 0b1111);
  CHECK(grz->first.truth[0].test(0));
  CHECK(!grz->first.truth[0].test(1));
  CHECK(grz->second == 1);

  // Dm needs a third world: no 2-world pre-lattice refutes it.
  auto dm2 = find_countermodel(FrameClass::PreLattice,
                               axiom_by_name("Dm").scheme.templ, 2);
  CHECK(!dm2.has_value());
  auto dm3 = find_countermodel(FrameClass::PreLattice,
                               axiom_by_name("Dm").scheme.templ, 3);
  REQUIRE(dm3.has_value());
  CHECK(dm3->first.frame.worlds == 3);

  // S4.2 axioms admit no pre-lattice countermodel at all.
  for (const char* name : {"K", "Dual", "S", "4", ".2"}) {
    auto cm = find_countermodel(FrameClass::PreLattice,
                                axiom_by_name(name).scheme.templ, 4);
    CHECK_MESSAGE(!cm.has_value(), name);
  }
}

TEST_CASE("instances of theory axioms stay valid under substitution") {
  // Substituting compound formulas preserves frame validity.
  Frame diamond(4);
  for (uint32_t w = 0; w < 4; ++w) diamond.add_edge(w, w);
  diamond.add_edge(0, 1);
  diamond.add_edge(0, 2);
  diamond.add_edge(0, 3);
  diamond.add_edge(1, 3);
  diamond.add_edge(2, 3);
  for (const char* ax : {"K", "Dual", "S", "4", ".2"}) {
    CHECK(valid_on_frame(diamond, inst(ax, "<>p & q")));
    CHECK(valid_on_frame(diamond, inst(ax, "[]p | ~q")));
  }
}

TEST_CASE("theory diagram has the sixteen expected edges") {
  const auto& edges = theory_diagram();
  REQUIRE(edges.size() == 16);
  auto has = [&](const char* s, const char* w) {
    for (const auto& e : edges)
      if (e.stronger == s && e.weaker == w) return true;
    return false;
  };
  CHECK(has("S5", "S4W5"));
  CHECK(has("S4W5", "S4.3"));
  CHECK(has("S4W5", "Dm.2"));
  CHECK(has("S4.2.1", "S4.1"));
  CHECK(has("S4.2.1", "S4.2"));
  CHECK(has("S4.3", "S4.2"));
  CHECK(has("Dm.2", "S4.2"));
  CHECK(has("Dm.2", "Dm"));
  CHECK(has("Grz", "Dm"));
  CHECK(has("S4.1", "S4"));
  CHECK(has("S4.2", "S4"));
  CHECK(has("Dm", "S4"));
  CHECK(has("K4H", "K4"));
  CHECK(has("GL", "K4"));
  CHECK(has("S4", "K4"));
  CHECK(has("K4", "K"));
}

TEST_CASE("inclusion verification passes with strictness witnesses at 4") {
  DiagramReport report = verify_frame_inclusions(4);
  CHECK(report.all_pass());
  CHECK(report.edges.size() == 16);
  CHECK(report.frames_checked > 3000);

  for (const EdgeCheck& ec : report.edges) {
    CHECK(ec.inclusion_holds);
    std::string label = ec.edge.stronger + " -> " + ec.edge.weaker;
    REQUIRE_MESSAGE(ec.strictness_witness.has_value(), label);
    // Re-verify the witness: weaker axioms all valid, some stronger fails.
    const Frame& fr = *ec.strictness_witness;
    bool weaker_ok = true;
    for (const std::string& ax : theory_by_name(ec.edge.weaker).axioms)
      weaker_ok = weaker_ok &&
                  valid_on_frame(fr, axiom_by_name(ax).scheme.templ);
    CHECK(weaker_ok);
    bool stronger_fails = false;
    for (const std::string& ax : theory_by_name(ec.edge.stronger).axioms)
      if (!valid_on_frame(fr, axiom_by_name(ax).scheme.templ))
        stronger_fails = true;
    CHECK(stronger_fails);
  }

  // One edge's witness needs all four worlds.
  DiagramReport at3 = verify_frame_inclusions(3);
  bool linear_gap = false;
  for (const EdgeCheck& ec : at3.edges)
    if (ec.edge.stronger == "S4.3" && ec.edge.weaker == "S4.2")
      linear_gap = !ec.strictness_witness.has_value();
  CHECK(linear_gap);
  CHECK(!at3.all_pass());
}
