#include "mvk/toy_multiverse.hpp"

#include <algorithm>
#include <bit>

#include "mvk/errors.hpp"
#include "mvk/formula_pool.hpp"

namespace mvk {

ToyMultiverse make_multiverse(uint32_t buttons, uint32_t switches,
                              const Limits& limits) {
  if (buttons > 4 || switches > 4)
    throw CapExceeded("toy multiverses are capped at 4 buttons and 4 switches");
  uint64_t states = uint64_t{1} << (buttons + switches);
  if (states > limits.max_states)
    throw CapExceeded("state space of " + std::to_string(states) +
                      " exceeds the cap of " + std::to_string(limits.max_states));

  std::vector<std::string> atoms;
  for (uint32_t i = 0; i < buttons; ++i)
    atoms.push_back("button_" + std::to_string(i));
  for (uint32_t j = 0; j < switches; ++j)
    atoms.push_back("switch_" + std::to_string(j));

  ToyMultiverse mv;
  mv.buttons = buttons;
  mv.switches = switches;
  uint32_t n = static_cast<uint32_t>(states);
  Frame fr(n);
  for (uint32_t u = 0; u < n; ++u) {
    uint32_t bu = u >> switches;
    for (uint32_t v = 0; v < n; ++v) {
      uint32_t bv = v >> switches;
      if ((bu & ~bv) == 0) fr.add_edge(u, v);
    }
  }
  mv.model = KripkeModel(std::move(fr), std::move(atoms));
  for (uint32_t u = 0; u < n; ++u) {
    uint32_t bu = u >> switches;
    uint32_t su = u & ((uint32_t{1} << switches) - 1);
    for (uint32_t i = 0; i < buttons; ++i)
      if (bu >> i & 1) mv.model.truth[i].set(u);
    for (uint32_t j = 0; j < switches; ++j)
      if (su >> j & 1) mv.model.truth[buttons + j].set(u);
  }
  return mv;
}

WorldSet Statement::resolve(const ToyMultiverse& mv) const {
  if (!states && !formula)
    throw DomainError(DomainError::Kind::BadInput,
                      "statement needs a state set or a formula");
  std::optional<WorldSet> from_formula;
  if (formula) from_formula = eval_set(mv.model, *formula);
  if (states && from_formula && !(*states == *from_formula))
    throw DomainError(DomainError::Kind::InvariantViolation,
                      "statement's state set and formula disagree");
  return states ? *states : *from_formula;
}

std::vector<std::string> Classification::labels() const {
  std::vector<std::string> out;
  if (is_button) out.push_back(pushed ? "pushed-button" : "button");
  if (is_switch) out.push_back("switch");
  if (is_negated_button) out.push_back("negated-button");
  return out;
}

namespace {

WorldSet frame_box(const Frame& fr, const WorldSet& s) {
  WorldSet out(fr.worlds);
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (fr.succ[w].subset_of(s)) out.set(w);
  return out;
}

WorldSet frame_dia(const Frame& fr, const WorldSet& s) {
  WorldSet out(fr.worlds);
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (fr.succ[w].intersects(s)) out.set(w);
  return out;
}

}  // namespace

Classification classify_statement(const ToyMultiverse& mv, const WorldSet& st,
                                  uint32_t world) {
  const Frame& fr = mv.model.frame;
  if (st.size() != fr.worlds)
    throw DomainError(DomainError::Kind::BadInput,
                      "statement universe does not match the state space");
  if (world >= fr.worlds)
    throw DomainError(DomainError::Kind::BadInput, "state index out of range");
  WorldSet not_st = st.complement();
  Classification c;
  c.is_switch =
      frame_box(fr, frame_dia(fr, st) & frame_dia(fr, not_st)).test(world);
  c.is_button = frame_box(fr, frame_dia(fr, frame_box(fr, st))).test(world);
  c.is_negated_button =
      frame_box(fr, frame_dia(fr, frame_box(fr, not_st))).test(world);
  c.pushed = c.is_button && frame_box(fr, st).test(world);
  return c;
}

TrichotomyReport check_trichotomy(const ToyMultiverse& mv, uint32_t world,
                                  const Limits& limits) {
  uint32_t n = mv.state_count();
  if (n > 16 || (uint64_t{1} << n) > limits.max_statements)
    throw CapExceeded("trichotomy sweep needs 2^" + std::to_string(n) +
                      " statements");
  TrichotomyReport report;
  report.statements = uint64_t{1} << n;
  for (uint64_t mask = 0; mask < report.statements; ++mask) {
    WorldSet st(n);
    for (uint32_t i = 0; i < n; ++i)
      if (mask >> i & 1) st.set(i);
    Classification c = classify_statement(mv, st, world);
    if (c.is_button) ++report.buttons;
    if (c.is_switch) ++report.switches;
    if (c.is_negated_button) ++report.negated_buttons;
    if (!c.labeled() && report.unlabeled.size() < 16)
      report.unlabeled.push_back(mask);
  }
  return report;
}

bool check_independence(const KripkeModel& m,
                        const std::vector<std::string>& button_atoms,
                        const std::vector<std::string>& switch_atoms,
                        uint32_t world) {
  const Frame& fr = m.frame;
  if (world >= fr.worlds)
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  auto mask_of = [&](const std::vector<std::string>& atoms, uint32_t w) {
    uint32_t mask = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      int idx = m.var_index(atoms[i]);
      if (idx < 0)
        throw DomainError(DomainError::Kind::UnknownVariable,
                          "atom '" + atoms[i] + "' is not in the model");
      if (m.truth[static_cast<std::size_t>(idx)].test(w))
        mask |= uint32_t{1} << i;
    }
    return mask;
  };

  if (mask_of(button_atoms, world) != 0) return false;

  // Reachable cone of `world`, world itself included.
  WorldSet reach(fr.worlds);
  reach.set(world);
  std::vector<uint32_t> queue{world};
  while (!queue.empty()) {
    uint32_t u = queue.back();
    queue.pop_back();
    for (uint32_t v : fr.succ[u].members())
      if (!reach.test(v)) {
        reach.set(v);
        queue.push_back(v);
      }
  }

  for (uint32_t u : reach.members()) {
    uint32_t bu = mask_of(button_atoms, u);
    uint32_t su = mask_of(switch_atoms, u);
    for (std::size_t i = 0; i < button_atoms.size(); ++i) {
      if (bu >> i & 1) continue;
      bool found = false;
      for (uint32_t v : fr.succ[u].members())
        if (mask_of(button_atoms, v) == (bu | uint32_t{1} << i) &&
            mask_of(switch_atoms, v) == su)
          found = true;
      if (!found) return false;
    }
    for (std::size_t j = 0; j < switch_atoms.size(); ++j) {
      bool found = false;
      for (uint32_t v : fr.succ[u].members())
        if (mask_of(button_atoms, v) == bu &&
            mask_of(switch_atoms, v) == (su ^ uint32_t{1} << j))
          found = true;
      if (!found) return false;
    }
  }
  return true;
}

bool check_independence(const ToyMultiverse& mv, uint32_t world) {
  std::vector<std::string> buttons(mv.model.vars.begin(),
                                   mv.model.vars.begin() + mv.buttons);
  std::vector<std::string> switches(mv.model.vars.begin() + mv.buttons,
                                    mv.model.vars.end());
  return check_independence(mv.model, buttons, switches, world);
}

namespace {

bool maximality_holds(const Frame& fr, const WorldSet& st, uint32_t world) {
  WorldSet nec = frame_box(fr, st);
  return !frame_dia(fr, nec).test(world) || nec.test(world);
}

}  // namespace

MaximalityReport check_maximality(
    const ToyMultiverse& mv, uint32_t world,
    const std::vector<std::pair<std::string, Statement>>& family) {
  MaximalityReport report;
  for (const auto& [label, st] : family) {
    bool holds = maximality_holds(mv.model.frame, st.resolve(mv), world);
    report.rows.push_back({label, holds});
    ++report.checked;
    if (!holds) ++report.failures;
  }
  return report;
}

MaximalitySweep check_maximality_all_statements(const ToyMultiverse& mv,
                                                uint32_t world,
                                                const Limits& limits) {
  uint32_t n = mv.state_count();
  if (n > 16 || (uint64_t{1} << n) > limits.max_statements)
    throw CapExceeded("maximality sweep needs 2^" + std::to_string(n) +
                      " statements");
  MaximalitySweep sweep;
  sweep.checked = uint64_t{1} << n;
  for (uint64_t mask = 0; mask < sweep.checked; ++mask) {
    WorldSet st(n);
    for (uint32_t i = 0; i < n; ++i)
      if (mask >> i & 1) st.set(i);
    if (!maximality_holds(mv.model.frame, st, world)) {
      ++sweep.failures;
      if (sweep.failing_examples.size() < 16)
        sweep.failing_examples.push_back(mask);
    }
  }
  return sweep;
}

SimulationResult simulate_kripke_model(const KripkeModel& m, uint32_t world,
                                       const SimulationOptions& opts) {
  if (world >= m.frame.worlds)
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  ClusterPoset q = quotient_poset(m.frame);
  auto pattern = powerset_pattern(q);
  if (!pattern)
    throw DomainError(DomainError::Kind::NotPreBooleanAlgebra,
                      "cluster order is not a full subset order");
  uint32_t dim = static_cast<uint32_t>(std::countr_zero(q.clusters));

  uint32_t max_cluster = 0;
  for (const auto& c : q.members)
    max_cluster = std::max<uint32_t>(max_cluster, c.size());
  uint32_t sw = 0;
  while ((uint32_t{1} << sw) < max_cluster) ++sw;
  if (sw > 4)
    throw DomainError(DomainError::Kind::ClusterTooLarge,
                      "largest cluster needs 2^" + std::to_string(sw) +
                          " switch patterns");

  SimulationResult result;
  result.mv = make_multiverse(dim, sw, opts.limits);
  uint32_t states = result.mv.state_count();
  uint32_t patterns = uint32_t{1} << sw;

  // cluster id per button pattern
  std::vector<uint32_t> cluster_at(q.clusters);
  for (uint32_t c = 0; c < q.clusters; ++c) cluster_at[(*pattern)[c]] = c;

  Translation& tr = result.translation;
  tr.vars = m.vars;
  tr.state_of_world.assign(m.frame.worlds, 0);
  std::vector<uint32_t> rank(m.frame.worlds, 0);
  for (uint32_t c = 0; c < q.clusters; ++c)
    for (std::size_t k = 0; k < q.members[c].size(); ++k)
      rank[q.members[c][k]] = static_cast<uint32_t>(k);
  for (uint32_t u = 0; u < m.frame.worlds; ++u)
    tr.state_of_world[u] =
        result.mv.state_of((*pattern)[q.cluster_of[u]], rank[u]);

  tr.statements.assign(m.vars.size(), WorldSet(states));
  for (std::size_t i = 0; i < m.vars.size(); ++i)
    for (uint32_t b = 0; b < q.clusters; ++b) {
      uint32_t c = cluster_at[b];
      uint32_t size = static_cast<uint32_t>(q.members[c].size());
      for (uint32_t sigma = 0; sigma < patterns; ++sigma) {
        uint32_t member = q.members[c][sigma % size];
        if (m.truth[i].test(member))
          tr.statements[i].set(result.mv.state_of(b, sigma));
      }
    }

  // Verification: every family formula agrees between each world and its
  // image state, with variables read through the translation.
  if (m.frame.worlds > 64 || states > 64)
    throw CapExceeded("simulation verification handles at most 64 worlds");
  FormulaPool pool = generate_modal_family(
      static_cast<uint32_t>(m.vars.size()), opts.max_formula_nodes,
      opts.modal_depth);

  auto to_mask = [](const WorldSet& s) {
    uint64_t mask = 0;
    for (uint32_t i : s.members()) mask |= uint64_t{1} << i;
    return mask;
  };
  std::vector<uint64_t> succ_m(m.frame.worlds);
  for (uint32_t u = 0; u < m.frame.worlds; ++u)
    succ_m[u] = to_mask(m.frame.succ[u]);
  std::vector<uint64_t> succ_mv(states);
  for (uint32_t u = 0; u < states; ++u)
    succ_mv[u] = to_mask(result.mv.model.frame.succ[u]);
  std::vector<uint64_t> vars_m(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i)
    vars_m[i] = to_mask(m.truth[i]);
  std::vector<uint64_t> vars_mv(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i)
    vars_mv[i] = to_mask(tr.statements[i]);

  std::vector<uint64_t> truth_m = eval_pool(pool, succ_m, m.frame.worlds, vars_m);
  std::vector<uint64_t> truth_mv = eval_pool(pool, succ_mv, states, vars_mv);

  result.report.formulas_checked = pool.nodes.size();
  for (std::size_t f = 0; f < pool.nodes.size(); ++f)
    for (uint32_t u = 0; u < m.frame.worlds; ++u) {
      bool here = truth_m[f] >> u & 1;
      bool there = truth_mv[f] >> tr.state_of_world[u] & 1;
      if (here != there) {
        ++result.report.discrepancies;
        if (result.report.examples.size() < 8)
          result.report.examples.push_back(
              render_formula(pool.to_formula(static_cast<int32_t>(f), m.vars)) +
              " @ world " + std::to_string(u));
      }
    }
  return result;
}

bool check_fold_bisimulation(const KripkeModel& m, const SimulationResult& sim) {
  const Frame& fm = m.frame;
  const Frame& fs = sim.mv.model.frame;
  uint32_t states = sim.mv.state_count();

  ClusterPoset q = quotient_poset(fm);
  auto pattern = powerset_pattern(q);
  if (!pattern) return false;
  std::vector<uint32_t> rank(fm.worlds, 0);
  for (uint32_t c = 0; c < q.clusters; ++c)
    for (std::size_t k = 0; k < q.members[c].size(); ++k)
      rank[q.members[c][k]] = static_cast<uint32_t>(k);

  auto related = [&](uint32_t u, uint32_t st) {
    uint32_t c = q.cluster_of[u];
    if ((*pattern)[c] != sim.mv.button_mask(st)) return false;
    uint32_t size = static_cast<uint32_t>(q.members[c].size());
    return sim.mv.switch_mask(st) % size == rank[u];
  };

  for (uint32_t u = 0; u < fm.worlds; ++u)
    for (uint32_t st = 0; st < states; ++st) {
      if (!related(u, st)) continue;
      // Atom harmony under the translation.
      for (std::size_t i = 0; i < m.vars.size(); ++i)
        if (m.truth[i].test(u) != sim.translation.statements[i].test(st))
          return false;
      // Forth: each successor world is matched by some successor state.
      for (uint32_t v : fm.succ[u].members()) {
        bool matched = false;
        for (uint32_t st2 : fs.succ[st].members())
          if (related(v, st2)) matched = true;
        if (!matched) return false;
      }
      // Back: each successor state is matched by some successor world.
      for (uint32_t st2 : fs.succ[st].members()) {
        bool matched = false;
        for (uint32_t v : fm.succ[u].members())
          if (related(v, st2)) matched = true;
        if (!matched) return false;
      }
    }
  return true;
}

}  // namespace mvk
