#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mvk/errors.hpp"
#include "mvk/toy_multiverse.hpp"

using namespace mvk;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/fixtures/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WorldSet states_of(const ToyMultiverse& mv,
                   const std::vector<uint32_t>& states) {
  WorldSet out(mv.state_count());
  for (uint32_t s : states) out.set(s);
  return out;
}

// Direct reading of the three labels from the accessibility relation,
// independent of classify_statement.
struct DirectLabels {
  bool button, neg_button, sw;
};
DirectLabels direct_labels(const ToyMultiverse& mv, const WorldSet& st,
                           uint32_t world) {
  const Frame& fr = mv.model.frame;
  uint32_t n = mv.state_count();
  auto nec = [&](const WorldSet& s, uint32_t w) {
    for (uint32_t v = 0; v < n; ++v)
      if (fr.edge(w, v) && !s.test(v)) return false;
    return true;
  };
  auto poss = [&](const WorldSet& s, uint32_t w) {
    for (uint32_t v = 0; v < n; ++v)
      if (fr.edge(w, v) && s.test(v)) return true;
    return false;
  };
  WorldSet comp(n);
  for (uint32_t v = 0; v < n; ++v)
    if (!st.test(v)) comp.set(v);

  // button: from every successor one can reach a state where st is settled.
  auto is_button = [&](const WorldSet& s) {
    for (uint32_t v = 0; v < n; ++v) {
      if (!fr.edge(world, v)) continue;
      bool can_settle = false;
      for (uint32_t u = 0; u < n; ++u)
        if (fr.edge(v, u) && nec(s, u)) can_settle = true;
      if (!can_settle) return false;
    }
    return true;
  };
  // switch: every successor can still reach both s and its complement.
  bool sw = true;
  for (uint32_t v = 0; v < n; ++v)
    if (fr.edge(world, v) && !(poss(st, v) && poss(comp, v))) sw = false;
  return {is_button(st), is_button(comp), sw};
}

}  // namespace

TEST_CASE("multiverse construction and state arithmetic") {
  ToyMultiverse mv = make_multiverse(2, 1);
  CHECK(mv.state_count() == 8);
  CHECK(mv.model.frame.worlds == 8);
  CHECK(mv.root() == 0);
  CHECK(mv.state_of(0b11, 0b1) == 7);
  CHECK(mv.button_mask(7) == 0b11);
  CHECK(mv.switch_mask(7) == 0b1);

  // Accessibility: button sets only grow, switches move freely.
  const Frame& fr = mv.model.frame;
  for (uint32_t a = 0; a < 8; ++a)
    for (uint32_t b = 0; b < 8; ++b) {
      bool super =
          (mv.button_mask(a) & mv.button_mask(b)) == mv.button_mask(a);
      CHECK(fr.edge(a, b) == super);
    }

  // Atoms read the components.
  REQUIRE(mv.model.var_index("button_0") >= 0);
  REQUIRE(mv.model.var_index("switch_0") >= 0);
  for (uint32_t s = 0; s < 8; ++s) {
    CHECK(eval(mv.model, s, parse_formula("button_0")) ==
          ((mv.button_mask(s) & 1) != 0));
    CHECK(eval(mv.model, s, parse_formula("switch_0")) ==
          ((mv.switch_mask(s) & 1) != 0));
  }

  // The cluster order is the subset order on the button sets.
  ClusterPoset q = quotient_poset(fr);
  CHECK(q.clusters == 4);
  for (const auto& cluster : q.members) CHECK(cluster.size() == 2);
  CHECK(poset_is_lattice(q));
  CHECK(powerset_pattern(q).has_value());

  CHECK_THROWS_AS(make_multiverse(5, 0), CapExceeded);
  Limits tight;
  tight.max_states = 4;
  CHECK_THROWS_AS(make_multiverse(2, 2, tight), CapExceeded);
}

TEST_CASE("multiverse frame validates the directed preorder axioms") {
  ToyMultiverse mv = make_multiverse(1, 2);
  for (const char* ax : {"[](p -> q) -> ([]p -> []q)", "[]~p <-> ~<>p",
                         "[]p -> p", "[]p -> [][]p", "<>[]p -> []<>p"}) {
    CHECK(valid_on_frame(mv.model.frame, parse_formula(ax)));
  }
}

TEST_CASE("statement classification on the 1+1 multiverse") {
  ToyMultiverse mv = make_multiverse(1, 1);
  // States: 0=(-,0) 1=(-,1) 2=(b,0) 3=(b,1).
  WorldSet button = states_of(mv, {2, 3});
  WorldSet toggler = states_of(mv, {1, 3});
  WorldSet neg = states_of(mv, {0, 1});

  Classification cb = classify_statement(mv, button, 0);
  CHECK(cb.is_button);
  CHECK(!cb.pushed);
  CHECK(!cb.is_switch);
  CHECK(!cb.is_negated_button);
  CHECK(cb.labels() == std::vector<std::string>{"button"});

  Classification cp = classify_statement(mv, button, 2);
  CHECK(cp.is_button);
  CHECK(cp.pushed);

  Classification cs = classify_statement(mv, toggler, 0);
  CHECK(cs.is_switch);
  CHECK(!cs.is_button);
  CHECK(cs.labels() == std::vector<std::string>{"switch"});

  Classification cn = classify_statement(mv, neg, 0);
  CHECK(cn.is_negated_button);
  CHECK(!cn.is_button);

  // The empty and full statements are degenerate buttons: the full set is
  // pushed everywhere, the empty one is a negated button.
  Classification cfull = classify_statement(mv, states_of(mv, {0, 1, 2, 3}), 0);
  CHECK(cfull.is_button);
  CHECK(cfull.pushed);
  Classification cempty = classify_statement(mv, WorldSet(4), 0);
  CHECK(cempty.is_negated_button);
}

TEST_CASE("statements resolve from formulas and explicit sets") {
  ToyMultiverse mv = make_multiverse(1, 1);
  Statement by_states;
  by_states.states = states_of(mv, {2, 3});
  Statement by_formula;
  by_formula.formula = parse_formula("button_0");
  CHECK(by_states.resolve(mv) == by_formula.resolve(mv));

  Statement both;
  both.states = states_of(mv, {2, 3});
  both.formula = parse_formula("button_0");
  CHECK(both.resolve(mv) == *both.states);

  Statement conflict;
  conflict.states = states_of(mv, {0});
  conflict.formula = parse_formula("button_0");
  CHECK_THROWS_AS(conflict.resolve(mv), DomainError);

  Statement neither;
  CHECK_THROWS_AS(neither.resolve(mv), DomainError);
}

TEST_CASE("trichotomy at the root, against a direct recount") {
  ToyMultiverse mv = make_multiverse(1, 1);
  TrichotomyReport rep = check_trichotomy(mv, 0);
  CHECK(rep.statements == 16);
  CHECK(rep.unlabeled.empty());

  uint64_t buttons = 0, switches = 0, negated = 0;
  for (uint32_t mask = 0; mask < 16; ++mask) {
    WorldSet st(4);
    for (uint32_t s = 0; s < 4; ++s)
      if (mask & (1u << s)) st.set(s);
    DirectLabels d = direct_labels(mv, st, 0);
    Classification c = classify_statement(mv, st, 0);
    CHECK(c.is_button == d.button);
    CHECK(c.is_negated_button == d.neg_button);
    CHECK(c.is_switch == d.sw);
    if (d.button) ++buttons;
    if (d.sw) ++switches;
    if (d.neg_button) ++negated;
    CHECK((d.button || d.sw || d.neg_button));
  }
  CHECK(rep.buttons == buttons);
  CHECK(rep.switches == switches);
  CHECK(rep.negated_buttons == negated);
}

TEST_CASE("trichotomy off the root still labels everything on 2+2") {
  ToyMultiverse mv = make_multiverse(2, 2);
  TrichotomyReport rep = check_trichotomy(mv, 0);
  CHECK(rep.statements == 65536);
  CHECK(rep.unlabeled.empty());
  // Complementation swaps buttons and negated buttons.
  CHECK(rep.buttons == rep.negated_buttons);
  CHECK(rep.buttons + rep.switches + rep.negated_buttons >= rep.statements);

  Limits tight;
  tight.max_statements = 100;
  CHECK_THROWS_AS(check_trichotomy(mv, 0, tight), CapExceeded);
}

TEST_CASE("independence holds on the multiverse, fails with a side effect") {
  ToyMultiverse mv = make_multiverse(2, 2);
  CHECK(check_independence(mv, 0));

  // Pushing the button from state 0 forces the switch on: no lone push.
  KripkeModel side = model_from_json(fixture("model_side_effect.json"));
  CHECK(!check_independence(side, {"btn"}, {"sw"}, 0));

  // The same shape with the missing lone-push edge restored passes.
  KripkeModel fixed = side;
  fixed.frame.add_edge(0, 2);
  fixed.frame.add_edge(1, 2);
  CHECK(check_independence(fixed, {"btn"}, {"sw"}, 0));
}

TEST_CASE("maximality fails exactly on the unpushed buttons") {
  ToyMultiverse mv = make_multiverse(1, 1);
  std::vector<std::pair<std::string, Statement>> family;
  auto add = [&](const char* label, std::vector<uint32_t> states) {
    Statement st;
    st.states = states_of(mv, states);
    family.emplace_back(label, st);
  };
  add("button", {2, 3});
  add("switch", {1, 3});
  add("negated", {0, 1});
  add("full", {0, 1, 2, 3});

  MaximalityReport rep = check_maximality(mv, 0, family);
  CHECK(rep.checked == 4);
  CHECK(rep.failures == 1);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].label == "button");
  CHECK(!rep.rows[0].holds);
  CHECK(rep.rows[1].holds);
  CHECK(rep.rows[2].holds);
  CHECK(rep.rows[3].holds);

  // At an all-pushed state every statement satisfies the implication.
  MaximalityReport top = check_maximality(mv, 2, family);
  CHECK(top.failures == 0);
}

TEST_CASE("maximality sweep matches the cone count") {
  // On 2 buttons + 1 switch the failures are exactly the proper supersets
  // of the all-pushed cone {6,7}: 2^6 - 1 of them.
  ToyMultiverse mv = make_multiverse(2, 1);
  MaximalitySweep sweep = check_maximality_all_statements(mv, 0);
  CHECK(sweep.checked == 256);
  CHECK(sweep.failures == 63);
  REQUIRE(!sweep.failing_examples.empty());
  CHECK(sweep.failing_examples.front() == 0b11000000);

  // At the all-pushed state nothing fails.
  MaximalitySweep at_top = check_maximality_all_statements(mv, 6);
  CHECK(at_top.failures == 0);
}

TEST_CASE("simulation embeds small models into multiverses") {
  SUBCASE("a single 2-cluster becomes one switch") {
    KripkeModel m = model_from_json(fixture("model_cluster2.json"));
    SimulationResult sim = simulate_kripke_model(m, 0);
    CHECK(sim.mv.buttons == 0);
    CHECK(sim.mv.switches == 1);
    CHECK(sim.report.discrepancies == 0);
    CHECK(sim.report.formulas_checked > 1000);
    CHECK(sim.translation.state_of_world.size() == 2);
    CHECK(check_fold_bisimulation(m, sim));
  }
  SUBCASE("the reflexive 2-chain becomes one button") {
    KripkeModel m = model_from_json(fixture("model_chain2.json"));
    SimulationResult sim = simulate_kripke_model(m, 0);
    CHECK(sim.mv.buttons == 1);
    CHECK(sim.mv.switches == 0);
    CHECK(sim.report.discrepancies == 0);
    CHECK(check_fold_bisimulation(m, sim));

    // Statement interpretation maps p to the image of its truth set.
    REQUIRE(sim.translation.vars == std::vector<std::string>{"p"});
    const WorldSet& image = sim.translation.statements[0];
    for (uint32_t w = 0; w < 2; ++w)
      CHECK(image.test(sim.translation.state_of_world[w]) ==
            m.truth[0].test(w));
  }
  SUBCASE("non-lattice frames are rejected") {
    Frame fork(3);
    for (uint32_t w = 0; w < 3; ++w) fork.add_edge(w, w);
    fork.add_edge(0, 1);
    fork.add_edge(0, 2);
    KripkeModel m(fork, {"p"});
    CHECK_THROWS_AS(simulate_kripke_model(m, 0), DomainError);
  }
}

TEST_CASE("simulation honors caps") {
  KripkeModel m = model_from_json(fixture("model_cluster2.json"));
  SimulationOptions opts;
  opts.limits.max_states = 1;
  CHECK_THROWS_AS(simulate_kripke_model(m, 0, opts), CapExceeded);
}
