#include "mvk/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mvk/boolean_valued.hpp"
#include "mvk/errors.hpp"
#include "mvk/fo_logic.hpp"
#include "mvk/formula.hpp"
#include "mvk/geology.hpp"
#include "mvk/kripke.hpp"
#include "mvk/limits.hpp"
#include "mvk/poset.hpp"
#include "mvk/theories.hpp"
#include "mvk/toy_multiverse.hpp"
#include "json.hpp"

namespace mvk {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DomainError(DomainError::Kind::BadInput,
                      "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = text.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

bool is_scalar_array(const json& a) {
  return std::all_of(a.begin(), a.end(),
                     [](const json& v) { return v.is_primitive(); });
}

void render_text(const json& j, std::ostream& out, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_primitive()) {
        out << pad << key << ": " << value.dump() << "\n";
      } else if (value.is_array() && is_scalar_array(value)) {
        out << pad << key << ": " << value.dump() << "\n";
      } else {
        out << pad << key << ":\n";
        render_text(value, out, indent + 1);
      }
    }
  } else if (j.is_array()) {
    for (const auto& value : j) {
      if (value.is_primitive()) {
        out << pad << "- " << value.dump() << "\n";
      } else {
        out << pad << "-\n";
        render_text(value, out, indent + 1);
      }
    }
  } else {
    out << pad << j.dump() << "\n";
  }
}

// Shared command state: output sink, format, resource caps and the
// worst exit code any callback reported.
struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string format = "json";
  Limits limits;
  int exit_code = 0;

  void emit(const json& j) {
    if (format == "text")
      render_text(j, out, 0);
    else
      out << j.dump(2) << "\n";
  }
  void check(bool pass) {
    if (!pass) exit_code = std::max(exit_code, 1);
  }
};

json worldset_json(const WorldSet& ws) {
  json arr = json::array();
  for (uint32_t w : ws.members()) arr.push_back(w);
  return arr;
}

json model_json(const KripkeModel& m) { return json::parse(model_to_json(m)); }

json frame_json(const Frame& fr) {
  json j;
  j["worlds"] = fr.worlds;
  json edges = json::array();
  for (const auto& [a, b] : fr.edge_list()) edges.push_back(json::array({a, b}));
  j["edges"] = std::move(edges);
  if (fr.worlds <= 8) j["mask"] = fr.relation_mask();
  return j;
}

json stringset_json(const std::set<std::string>& s) {
  json arr = json::array();
  for (const auto& v : s) arr.push_back(v);
  return arr;
}

std::vector<uint32_t> parse_csv_u32(const std::string& text) {
  std::vector<uint32_t> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(static_cast<uint32_t>(v));
    } catch (const std::exception&) {
      throw DomainError(DomainError::Kind::BadInput,
                        "expected a comma-separated list of numbers, got: " +
                            text);
    }
  }
  return out;
}

FrameClass class_by_name(const std::string& name) {
  auto c = frame_class_from_name(name);
  if (!c)
    throw DomainError(DomainError::Kind::BadInput,
                      "unknown frame class: " + name);
  return *c;
}

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Valid:
      return "valid";
    case Verdict::Kind::Refuted:
      return "refuted";
    case Verdict::Kind::Unknown:
      return "unknown";
  }
  return "unknown";
}

// ---- modal ----------------------------------------------------------

void add_modal_parse(CLI::App& modal, Context& ctx) {
  auto* cmd = modal.add_subcommand("parse",
                                   "Parse a formula, list its subformulas");
  auto formula = std::make_shared<std::string>();
  auto subs = std::make_shared<std::vector<std::string>>();
  auto expect = std::make_shared<std::string>();
  cmd->add_option("formula", *formula, "Formula text")->required();
  cmd->add_option("--substitute", *subs,
                  "Binding var=formula applied to the input as a template");
  cmd->add_option("--expect", *expect, "Expected canonical rendering");
  cmd->callback([&ctx, formula, subs, expect] {
    Formula f = parse_formula(*formula);
    if (!subs->empty()) {
      std::map<std::string, Formula> bindings;
      for (const auto& s : *subs) {
        std::size_t at = s.find('=');
        if (at == std::string::npos || at == 0)
          throw DomainError(DomainError::Kind::BadInput,
                            "--substitute expects var=formula, got: " + s);
        bindings.emplace(s.substr(0, at), parse_formula(s.substr(at + 1)));
      }
      f = substitute(AxiomScheme{"input", f}, bindings);
    }
    json j;
    j["formula"] = render_formula(f);
    j["modal_depth"] = modal_depth(f);
    auto subf = subformulas(f);
    j["subformula_count"] = subf.size();
    json list = json::array();
    for (const auto& s : subf) list.push_back(render_formula(s));
    j["subformulas"] = std::move(list);
    j["variables"] = variables(f);
    if (!expect->empty()) {
      bool pass = render_formula(f) == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_modal_decide(CLI::App& modal, Context& ctx) {
  auto* cmd = modal.add_subcommand(
      "decide", "Decide a formula over a theory's frames, or one frame");
  auto formula = std::make_shared<std::string>();
  auto theory = std::make_shared<std::string>();
  auto frame_file = std::make_shared<std::string>();
  auto max_worlds = std::make_shared<uint32_t>(4);
  auto unknown = std::make_shared<bool>(false);
  auto expect = std::make_shared<std::string>();
  cmd->add_option("formula", *formula, "Formula text")->required();
  auto* theory_opt = cmd->add_option("--theory", *theory, "Theory name");
  auto* frame_opt =
      cmd->add_option("--frame", *frame_file, "Frame file (model JSON)");
  theory_opt->excludes(frame_opt);
  cmd->add_option("--max-worlds", *max_worlds, "Search bound (default 4)");
  cmd->add_flag("--unknown", *unknown,
                "Report unknown instead of an incomplete valid");
  cmd->add_option("--expect", *expect, "Expected verdict")
      ->check(CLI::IsMember({"valid", "refuted", "unknown", "true", "false"}));
  cmd->callback([&ctx, formula, theory, frame_file, max_worlds, unknown,
                 expect] {
    Formula f = parse_formula(*formula);
    json j;
    j["formula"] = render_formula(f);
    std::string outcome;
    if (!frame_file->empty()) {
      KripkeModel m = model_from_json(slurp(*frame_file));
      bool valid = valid_on_frame(m.frame, f, ctx.limits);
      j["frame_worlds"] = m.frame.worlds;
      j["valid"] = valid;
      outcome = valid ? "true" : "false";
    } else {
      if (theory->empty())
        throw DomainError(DomainError::Kind::BadInput,
                          "either --theory or --frame is required");
      DecideOptions opts;
      opts.unknown_on_incomplete = *unknown;
      opts.limits = ctx.limits;
      Verdict v = decide(theory_by_name(*theory), f, *max_worlds, opts);
      j["theory"] = *theory;
      j["verdict"] = verdict_name(v.kind);
      outcome = verdict_name(v.kind);
      if (v.kind == Verdict::Kind::Refuted) {
        j["model"] = model_json(v.model);
        j["world"] = v.world;
      } else {
        j["searched_bound"] = v.searched_bound;
        j["complete"] = v.complete;
      }
    }
    if (!expect->empty()) {
      bool pass = outcome == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_modal_countermodel(CLI::App& modal, Context& ctx) {
  auto* cmd = modal.add_subcommand(
      "countermodel",
      "Search a frame class for a countermodel, or evaluate in a model");
  auto formula = std::make_shared<std::string>();
  auto klass = std::make_shared<std::string>("pre-lattice");
  auto max_worlds = std::make_shared<uint32_t>(4);
  auto model_file = std::make_shared<std::string>();
  auto world = std::make_shared<uint32_t>(0);
  auto expect = std::make_shared<std::string>();
  cmd->add_option("formula", *formula, "Formula text")->required();
  cmd->add_option("--class", *klass, "Frame class (default pre-lattice)");
  cmd->add_option("--max-worlds", *max_worlds, "Search bound (default 4)");
  cmd->add_option("--model", *model_file,
                  "Evaluate in this model instead of searching");
  cmd->add_option("--world", *world, "World for --model evaluation");
  cmd->add_option("--expect", *expect, "Expected outcome")
      ->check(CLI::IsMember({"found", "none", "true", "false"}));
  cmd->callback([&ctx, formula, klass, max_worlds, model_file, world, expect] {
    Formula f = parse_formula(*formula);
    json j;
    j["formula"] = render_formula(f);
    std::string outcome;
    if (!model_file->empty()) {
      KripkeModel m = model_from_json(slurp(*model_file));
      bool value = eval(m, *world, f);
      j["world"] = *world;
      j["value"] = value;
      outcome = value ? "true" : "false";
    } else {
      auto r = find_countermodel(class_by_name(*klass), f, *max_worlds,
                                 ctx.limits);
      j["class"] = *klass;
      j["max_worlds"] = *max_worlds;
      j["found"] = r.has_value();
      outcome = r ? "found" : "none";
      if (r) {
        j["model"] = model_json(r->first);
        j["world"] = r->second;
      }
    }
    if (!expect->empty()) {
      bool pass = outcome == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_modal_inclusions(CLI::App& modal, Context& ctx) {
  auto* cmd = modal.add_subcommand(
      "inclusions",
      "Verify the theory diagram; or list frames or the axiom catalog");
  auto max_worlds = std::make_shared<uint32_t>(4);
  auto enumerate = std::make_shared<std::string>();
  auto dedup = std::make_shared<bool>(false);
  auto catalog = std::make_shared<bool>(false);
  cmd->add_option("--max-worlds", *max_worlds, "Frame size bound (default 4)");
  cmd->add_option("--enumerate", *enumerate,
                  "List frames of this class instead");
  cmd->add_flag("--dedup", *dedup,
                "Keep one representative per isomorphism class");
  cmd->add_flag("--catalog", *catalog, "List the axiom templates instead");
  cmd->callback([&ctx, max_worlds, enumerate, dedup, catalog] {
    json j;
    if (*catalog) {
      json axioms = json::array();
      for (const auto& a : axiom_catalog()) {
        json row;
        row["name"] = a.name;
        row["formula"] = render_formula(a.scheme.templ);
        axioms.push_back(std::move(row));
      }
      j["axioms"] = std::move(axioms);
      ctx.emit(j);
      return;
    }
    if (!enumerate->empty()) {
      auto frames = enumerate_frames(*max_worlds, class_by_name(*enumerate),
                                     *dedup, ctx.limits);
      j["class"] = *enumerate;
      j["max_worlds"] = *max_worlds;
      j["dedup"] = *dedup;
      j["count"] = frames.size();
      json list = json::array();
      for (std::size_t i = 0; i < frames.size() && i < 64; ++i)
        list.push_back(frame_json(frames[i]));
      j["frames"] = std::move(list);
      ctx.emit(j);
      return;
    }
    DiagramReport rep = verify_frame_inclusions(*max_worlds, ctx.limits);
    j["max_worlds"] = rep.max_worlds;
    j["frames_checked"] = rep.frames_checked;
    j["all_pass"] = rep.all_pass();
    json edges = json::array();
    for (const auto& e : rep.edges) {
      json row;
      row["stronger"] = e.edge.stronger;
      row["weaker"] = e.edge.weaker;
      row["inclusion_holds"] = e.inclusion_holds;
      row["strictness_witness"] =
          e.strictness_witness ? frame_json(*e.strictness_witness)
                               : json(nullptr);
      edges.push_back(std::move(row));
    }
    j["edges"] = std::move(edges);
    ctx.check(rep.all_pass());
    ctx.emit(j);
  });
}

// ---- mv -------------------------------------------------------------

struct MvTarget {
  std::shared_ptr<uint32_t> buttons = std::make_shared<uint32_t>(0);
  std::shared_ptr<uint32_t> switches = std::make_shared<uint32_t>(0);

  void add_to(CLI::App* cmd) const {
    cmd->add_option("--buttons", *buttons, "Button count")->required();
    cmd->add_option("--switches", *switches, "Switch count")->required();
  }
};

Statement statement_from_flags(const std::string& formula,
                               const std::string& states, uint32_t state_count) {
  Statement st;
  if (!formula.empty()) st.formula = parse_formula(formula);
  if (!states.empty()) {
    WorldSet ws(state_count);
    for (uint32_t s : parse_csv_u32(states)) {
      if (s >= state_count)
        throw DomainError(DomainError::Kind::BadInput,
                          "state index out of range: " + std::to_string(s));
      ws.set(s);
    }
    st.states = ws;
  }
  if (!st.formula && !st.states)
    throw DomainError(DomainError::Kind::BadInput,
                      "either --statement or --states is required");
  return st;
}

void add_mv_build(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand("build",
                                "Build a multiverse, describe its frame");
  MvTarget t;
  t.add_to(cmd);
  auto expect_states = std::make_shared<int64_t>(-1);
  cmd->add_option("--expect-states", *expect_states, "Expected state count");
  cmd->callback([&ctx, t, expect_states] {
    ToyMultiverse m = make_multiverse(*t.buttons, *t.switches, ctx.limits);
    json j;
    j["buttons"] = m.buttons;
    j["switches"] = m.switches;
    j["states"] = m.state_count();
    json classes = json::array();
    for (FrameClass c : classify_frame(m.model.frame))
      classes.push_back(frame_class_name(c));
    j["frame_classes"] = std::move(classes);
    ClusterPoset q = quotient_poset(m.model.frame);
    j["clusters"] = q.clusters;
    j["lattice"] = poset_is_lattice(q);
    auto pattern = powerset_pattern(q);
    j["powerset_pattern"] = pattern ? json(*pattern) : json(nullptr);
    if (*expect_states >= 0) {
      bool pass = static_cast<int64_t>(m.state_count()) == *expect_states;
      j["expected_states"] = *expect_states;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_mv_classify(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand("classify", "Label one statement");
  MvTarget t;
  t.add_to(cmd);
  auto formula = std::make_shared<std::string>();
  auto states = std::make_shared<std::string>();
  auto world = std::make_shared<uint32_t>(0);
  auto expect = std::make_shared<std::string>();
  cmd->add_option("--statement", *formula, "Statement as a formula");
  cmd->add_option("--states", *states, "Statement as a state list");
  cmd->add_option("--world", *world, "Evaluation state (default root)");
  cmd->add_option("--expect", *expect, "Label that must be present");
  cmd->callback([&ctx, t, formula, states, world, expect] {
    ToyMultiverse m = make_multiverse(*t.buttons, *t.switches, ctx.limits);
    Statement st = statement_from_flags(*formula, *states, m.state_count());
    WorldSet ws = st.resolve(m);
    Classification c = classify_statement(m, ws, *world);
    json j;
    j["world"] = *world;
    j["states"] = worldset_json(ws);
    j["button"] = c.is_button;
    j["switch"] = c.is_switch;
    j["negated_button"] = c.is_negated_button;
    j["pushed"] = c.pushed;
    j["labels"] = c.labels();
    if (!expect->empty()) {
      auto labels = c.labels();
      bool pass = std::find(labels.begin(), labels.end(), *expect) !=
                  labels.end();
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_mv_trichotomy(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand("trichotomy",
                                "Label every statement; fail on leftovers");
  MvTarget t;
  t.add_to(cmd);
  auto world = std::make_shared<uint32_t>(0);
  cmd->add_option("--world", *world, "Evaluation state (default root)");
  cmd->callback([&ctx, t, world] {
    ToyMultiverse m = make_multiverse(*t.buttons, *t.switches, ctx.limits);
    TrichotomyReport rep = check_trichotomy(m, *world, ctx.limits);
    json j;
    j["world"] = *world;
    j["statements"] = rep.statements;
    j["buttons"] = rep.buttons;
    j["switches"] = rep.switches;
    j["negated_buttons"] = rep.negated_buttons;
    j["unlabeled_count"] = rep.unlabeled.size();
    j["unlabeled"] = rep.unlabeled;
    ctx.check(rep.unlabeled.empty());
    ctx.emit(j);
  });
}

void add_mv_independence(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand(
      "independence", "Check buttons and switches act independently");
  MvTarget t;
  t.add_to(cmd);
  auto world = std::make_shared<uint32_t>(0);
  auto expect = std::make_shared<std::string>();
  cmd->add_option("--world", *world, "Start state (default root)");
  cmd->add_option("--expect", *expect, "Expected answer")
      ->check(CLI::IsMember({"true", "false"}));
  cmd->callback([&ctx, t, world, expect] {
    ToyMultiverse m = make_multiverse(*t.buttons, *t.switches, ctx.limits);
    bool independent = check_independence(m, *world);
    json j;
    j["world"] = *world;
    j["independent"] = independent;
    if (!expect->empty()) {
      bool pass = (independent ? "true" : "false") == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_mv_maximality(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand(
      "maximality", "Possibly-necessary implies necessary, per statement");
  MvTarget t;
  t.add_to(cmd);
  auto world = std::make_shared<uint32_t>(0);
  auto formula = std::make_shared<std::string>();
  auto states = std::make_shared<std::string>();
  auto expect_failures = std::make_shared<int64_t>(-1);
  cmd->add_option("--world", *world, "Evaluation state (default root)");
  cmd->add_option("--statement", *formula, "Check one statement (formula)");
  cmd->add_option("--states", *states, "Check one statement (state list)");
  cmd->add_option("--expect-failures", *expect_failures,
                  "Expected failure count for the sweep");
  cmd->callback([&ctx, t, world, formula, states, expect_failures] {
    ToyMultiverse m = make_multiverse(*t.buttons, *t.switches, ctx.limits);
    json j;
    j["world"] = *world;
    if (!formula->empty() || !states->empty()) {
      Statement st = statement_from_flags(*formula, *states, m.state_count());
      MaximalityReport rep =
          check_maximality(m, *world, {{"statement", st}});
      j["holds"] = rep.rows.front().holds;
      ctx.emit(j);
      return;
    }
    MaximalitySweep sweep =
        check_maximality_all_statements(m, *world, ctx.limits);
    j["checked"] = sweep.checked;
    j["failures"] = sweep.failures;
    j["failing_examples"] = sweep.failing_examples;
    if (*expect_failures >= 0) {
      bool pass = static_cast<int64_t>(sweep.failures) == *expect_failures;
      j["expected_failures"] = *expect_failures;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_mv_simulate(CLI::App& mv, Context& ctx) {
  auto* cmd = mv.add_subcommand(
      "simulate", "Embed a model into a multiverse and verify the embedding");
  auto model_file = std::make_shared<std::string>();
  auto world = std::make_shared<uint32_t>(0);
  auto max_nodes = std::make_shared<uint32_t>(6);
  auto depth = std::make_shared<uint32_t>(3);
  cmd->add_option("--model", *model_file, "Model file")->required();
  cmd->add_option("--world", *world, "Distinguished world (default 0)");
  cmd->add_option("--max-nodes", *max_nodes,
                  "Formula family node cap (default 6)");
  cmd->add_option("--depth", *depth, "Formula family depth cap (default 3)");
  cmd->callback([&ctx, model_file, world, max_nodes, depth] {
    KripkeModel m = model_from_json(slurp(*model_file));
    SimulationOptions opts;
    opts.max_formula_nodes = *max_nodes;
    opts.modal_depth = *depth;
    opts.limits = ctx.limits;
    SimulationResult sim = simulate_kripke_model(m, *world, opts);
    bool bisim = check_fold_bisimulation(m, sim);
    json j;
    j["buttons"] = sim.mv.buttons;
    j["switches"] = sim.mv.switches;
    j["states"] = sim.mv.state_count();
    json statements = json::object();
    for (std::size_t i = 0; i < sim.translation.vars.size(); ++i)
      statements[sim.translation.vars[i]] =
          worldset_json(sim.translation.statements[i]);
    j["statements"] = std::move(statements);
    j["state_of_world"] = sim.translation.state_of_world;
    j["formulas_checked"] = sim.report.formulas_checked;
    j["discrepancies"] = sim.report.discrepancies;
    j["examples"] = sim.report.examples;
    j["fold_bisimulation"] = bisim;
    ctx.check(sim.report.discrepancies == 0 && bisim);
    ctx.emit(j);
  });
}

// ---- bvm ------------------------------------------------------------

std::map<std::string, uint32_t> parse_env(const BValuedStructure& s,
                                          const std::string& text) {
  std::map<std::string, uint32_t> env;
  if (text.empty()) return env;
  for (const auto& part : split(text, ',')) {
    std::size_t at = part.find('=');
    if (at == std::string::npos || at == 0)
      throw DomainError(DomainError::Kind::BadInput,
                        "--env expects var=name pairs, got: " + part);
    int idx = s.name_index(part.substr(at + 1));
    if (idx < 0)
      throw DomainError(DomainError::Kind::BadInput,
                        "unknown name: " + part.substr(at + 1));
    env[part.substr(0, at)] = static_cast<uint32_t>(idx);
  }
  return env;
}

std::map<std::string, uint32_t> relation_arities(const BValuedStructure& s) {
  std::map<std::string, uint32_t> out;
  for (const auto& [name, r] : s.relations) out[name] = r.arity;
  return out;
}

json atom_list(uint64_t mask) {
  json arr = json::array();
  for (uint32_t a = 0; a < 64; ++a)
    if ((mask >> a) & 1) arr.push_back(a);
  return arr;
}

void add_bvm_value(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand("value", "Truth value of a formula");
  auto structure = std::make_shared<std::string>();
  auto formula = std::make_shared<std::string>();
  auto env_text = std::make_shared<std::string>();
  auto expect = std::make_shared<std::string>("unset");
  cmd->add_option("--structure", *structure, "Structure file")->required();
  cmd->add_option("formula", *formula, "Formula text")->required();
  cmd->add_option("--env", *env_text, "Free variable bindings var=name,...");
  cmd->add_option("--expect", *expect,
                  "Expected atom list, comma separated (may be empty)");
  cmd->callback([&ctx, structure, formula, env_text, expect] {
    BValuedStructure s = bvalued_from_json(slurp(*structure));
    FOFormula f = parse_fo_formula(*formula);
    uint64_t value = boolean_value(s, f, parse_env(s, *env_text));
    json j;
    j["formula"] = render_fo_formula(f);
    j["value_atoms"] = atom_list(value);
    j["is_top"] = value == s.algebra.top();
    if (*expect != "unset") {
      uint64_t want = 0;
      for (uint32_t a : parse_csv_u32(*expect)) want |= 1ull << a;
      bool pass = want == value;
      j["expected_atoms"] = atom_list(want);
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_bvm_equality(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand("equality", "Check the equality laws");
  auto structure = std::make_shared<std::string>();
  cmd->add_option("--structure", *structure, "Structure file")->required();
  cmd->callback([&ctx, structure] {
    BValuedStructure s = bvalued_from_json(slurp(*structure));
    EqualityLawReport rep = check_equality_laws(s);
    json j;
    j["ok"] = rep.ok();
    j["reflexive"] = rep.reflexive;
    j["symmetric"] = rep.symmetric;
    j["transitive"] = rep.transitive;
    j["substitutive"] = rep.substitutive;
    j["violations"] = rep.violations;
    ctx.check(rep.ok());
    ctx.emit(j);
  });
}

void add_bvm_full(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand(
      "full", "Check each existential value is attained by one name");
  auto structure = std::make_shared<std::string>();
  auto max_nodes = std::make_shared<uint32_t>(4);
  auto max_qdepth = std::make_shared<uint32_t>(2);
  auto expect = std::make_shared<std::string>();
  cmd->add_option("--structure", *structure, "Structure file")->required();
  cmd->add_option("--max-nodes", *max_nodes, "Family node cap (default 4)");
  cmd->add_option("--max-qdepth", *max_qdepth,
                  "Family quantifier depth cap (default 2)");
  cmd->add_option("--expect", *expect, "Expected answer")
      ->check(CLI::IsMember({"true", "false"}));
  cmd->callback([&ctx, structure, max_nodes, max_qdepth, expect] {
    BValuedStructure s = bvalued_from_json(slurp(*structure));
    auto family =
        generate_fo_family(relation_arities(s), *max_nodes, *max_qdepth);
    FullnessReport rep = check_fullness(s, family);
    json j;
    j["family_size"] = family.size();
    j["checked"] = rep.checked;
    j["full"] = rep.full;
    j["witness"] = rep.witness;
    if (!expect->empty()) {
      bool pass = (rep.full ? "true" : "false") == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_bvm_quotient(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand("quotient",
                                 "Collapse along a principal ultrafilter");
  auto structure = std::make_shared<std::string>();
  auto atom = std::make_shared<uint32_t>(0);
  cmd->add_option("--structure", *structure, "Structure file")->required();
  cmd->add_option("--atom", *atom, "Generating atom (default 0)");
  cmd->callback([&ctx, structure, atom] {
    BValuedStructure s = bvalued_from_json(slurp(*structure));
    Ultrafilter u = Ultrafilter::principal(s.algebra, *atom);
    QuotientResult q = quotient_by_ultrafilter(s, u);
    json j;
    j["atom"] = *atom;
    j["size"] = q.structure.size;
    json classes = json::object();
    for (uint32_t i = 0; i < s.name_count(); ++i)
      classes[s.names[i]] = q.class_of[i];
    j["classes"] = std::move(classes);
    j["structure"] = json::parse(classical_to_json(q.structure));
    ctx.emit(j);
  });
}

void add_bvm_los(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand(
      "los", "Truth-value membership must match truth in the quotient");
  auto structure = std::make_shared<std::string>();
  auto atom = std::make_shared<int64_t>(-1);
  auto max_nodes = std::make_shared<uint32_t>(4);
  auto max_qdepth = std::make_shared<uint32_t>(2);
  cmd->add_option("--structure", *structure, "Structure file")->required();
  cmd->add_option("--atom", *atom,
                  "Only this generating atom (default: all of them)");
  cmd->add_option("--max-nodes", *max_nodes, "Family node cap (default 4)");
  cmd->add_option("--max-qdepth", *max_qdepth,
                  "Family quantifier depth cap (default 2)");
  cmd->callback([&ctx, structure, atom, max_nodes, max_qdepth] {
    BValuedStructure s = bvalued_from_json(slurp(*structure));
    auto family =
        generate_fo_family(relation_arities(s), *max_nodes, *max_qdepth);
    std::vector<Ultrafilter> filters;
    if (*atom >= 0)
      filters.push_back(
          Ultrafilter::principal(s.algebra, static_cast<uint32_t>(*atom)));
    else
      filters = all_ultrafilters(s.algebra);
    json results = json::array();
    bool all_exact = true;
    for (const auto& u : filters) {
      TransferReport rep = verify_los(s, u, family);
      json row;
      row["atom"] = u.atom;
      row["checked"] = rep.checked;
      row["agreements"] = rep.agreements;
      row["exact"] = rep.exact();
      row["mismatches"] = rep.mismatches;
      results.push_back(std::move(row));
      all_exact = all_exact && rep.exact();
    }
    json j;
    j["family_size"] = family.size();
    j["results"] = std::move(results);
    j["all_exact"] = all_exact;
    ctx.check(all_exact);
    ctx.emit(j);
  });
}

void add_bvm_ultrapower(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand(
      "ultrapower", "Power of a plain structure by an atomic algebra");
  auto base = std::make_shared<std::string>();
  auto atoms = std::make_shared<uint32_t>(0);
  auto atom = std::make_shared<uint32_t>(0);
  auto mode = std::make_shared<std::string>("quotient");
  auto expect_iso = std::make_shared<bool>(false);
  cmd->add_option("--base", *base, "Base structure file")->required();
  cmd->add_option("--atoms", *atoms, "Algebra atom count")->required();
  cmd->add_option("--atom", *atom, "Generating atom (default 0)");
  cmd->add_option("--mode", *mode, "Construction mode")
      ->check(CLI::IsMember({"quotient", "antichain"}));
  cmd->add_flag("--expect-iso", *expect_iso,
                "Fail unless the result is isomorphic to the base");
  cmd->callback([&ctx, base, atoms, atom, mode, expect_iso] {
    ClassicalStructure b = classical_from_json(slurp(*base));
    FiniteBooleanAlgebra algebra{*atoms};
    Ultrafilter u = Ultrafilter::principal(algebra, *atom);
    UltrapowerMode m = *mode == "antichain" ? UltrapowerMode::AntichainLimit
                                            : UltrapowerMode::Quotient;
    UltrapowerResult r =
        boolean_ultrapower(b, *atoms, u, m, nullptr, ctx.limits);
    json j;
    j["mode"] = *mode;
    j["name_count"] = r.name_count;
    if (m == UltrapowerMode::AntichainLimit) {
      j["antichains"] = r.antichains;
      j["embeddings_commute"] = r.embeddings_commute;
    }
    j["size"] = r.structure.size;
    j["structure"] = json::parse(classical_to_json(r.structure));
    j["isomorphic_to_base"] = r.iso_to_base.has_value();
    j["iso"] = r.iso_to_base ? json(*r.iso_to_base) : json(nullptr);
    if (*expect_iso) ctx.check(r.iso_to_base.has_value());
    ctx.emit(j);
  });
}

void add_bvm_generic(CLI::App& bvm, Context& ctx) {
  auto* cmd = bvm.add_subcommand(
      "generic", "Build the deterministic filter through the dense sets");
  auto poset_file = std::make_shared<std::string>();
  auto expect_chain = std::make_shared<std::string>();
  cmd->add_option("--poset", *poset_file, "Order file")->required();
  cmd->add_option("--expect-chain", *expect_chain,
                  "Expected chain, comma-separated condition names");
  cmd->callback([&ctx, poset_file, expect_chain] {
    PosetSpec spec = poset_from_json(slurp(*poset_file));
    GenericFilterResult r =
        build_generic_filter(spec.poset, spec.dense_sets);
    json j;
    json chain = json::array();
    for (uint32_t c : r.chain) chain.push_back(spec.poset.conditions[c]);
    j["chain"] = chain;
    json filter = json::array();
    for (uint32_t c : r.filter) filter.push_back(spec.poset.conditions[c]);
    j["filter"] = std::move(filter);
    j["upward_closed"] = r.upward_closed;
    j["downward_directed"] = r.downward_directed;
    j["meets_every_dense_set"] =
        std::all_of(r.meets.begin(), r.meets.end(), [](bool b) { return b; });
    j["ok"] = r.ok();
    if (!expect_chain->empty()) {
      auto want = split(*expect_chain, ',');
      bool pass = chain.size() == want.size();
      for (std::size_t i = 0; pass && i < want.size(); ++i)
        pass = chain[i].get<std::string>() == want[i];
      j["expected_chain"] = want;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

// ---- geo ------------------------------------------------------------

uint32_t world_or_throw(const MultiverseGraph& g, const std::string& id) {
  int idx = g.world_index(id);
  if (idx < 0)
    throw DomainError(DomainError::Kind::BadInput, "unknown world: " + id);
  return static_cast<uint32_t>(idx);
}

json id_list(const MultiverseGraph& g, const std::vector<uint32_t>& worlds) {
  json arr = json::array();
  for (uint32_t w : worlds) arr.push_back(g.worlds[w].id);
  return arr;
}

void add_geo_analyze(CLI::App& geo, Context& ctx) {
  auto* cmd = geo.add_subcommand("analyze", "Grounds, bedrocks and the mantle");
  auto graph_file = std::make_shared<std::string>();
  auto world = std::make_shared<std::string>();
  cmd->add_option("--graph", *graph_file, "World family file")->required();
  cmd->add_option("--world", *world, "World id")->required();
  cmd->callback([&ctx, graph_file, world] {
    MultiverseGraph g = MultiverseGraph::from_json(slurp(*graph_file));
    WorldAnalysis a = analyze_world(g, world_or_throw(g, *world));
    json j;
    j["world"] = *world;
    j["grounds"] = id_list(g, a.grounds);
    j["extensions"] = id_list(g, a.extensions);
    j["bedrocks"] = id_list(g, a.bedrocks);
    j["ground_axiom"] = a.ground_axiom;
    j["mantle"] = stringset_json(a.mantle);
    j["mantle_world"] =
        a.mantle_world ? json(g.worlds[*a.mantle_world].id) : json(nullptr);
    ctx.emit(j);
  });
}

void add_geo_ddg(CLI::App& geo, Context& ctx) {
  auto* cmd = geo.add_subcommand(
      "ddg", "Do every world's grounds share a deeper ground pairwise?");
  auto graph_file = std::make_shared<std::string>();
  auto expect = std::make_shared<std::string>();
  cmd->add_option("--graph", *graph_file, "World family file")->required();
  cmd->add_option("--expect", *expect, "Expected answer")
      ->check(CLI::IsMember({"true", "false"}));
  cmd->callback([&ctx, graph_file, expect] {
    MultiverseGraph g = MultiverseGraph::from_json(slurp(*graph_file));
    DirectednessReport rep = check_downward_directed(g);
    json j;
    j["holds_everywhere"] = rep.holds_everywhere;
    j["failing_worlds"] = id_list(g, rep.failing_worlds);
    j["witness_pair"] =
        rep.witness_pair
            ? json(json::array({g.worlds[rep.witness_pair->first].id,
                                g.worlds[rep.witness_pair->second].id}))
            : json(nullptr);
    j["note"] = rep.note;
    if (!expect->empty()) {
      bool pass = (rep.holds_everywhere ? "true" : "false") == *expect;
      j["expected"] = *expect;
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_geo_multiverse(CLI::App& geo, Context& ctx) {
  auto* cmd = geo.add_subcommand(
      "multiverse", "Closure under grounds and extensions, two-step test");
  auto graph_file = std::make_shared<std::string>();
  auto world = std::make_shared<std::string>();
  cmd->add_option("--graph", *graph_file, "World family file")->required();
  cmd->add_option("--world", *world, "World id")->required();
  cmd->callback([&ctx, graph_file, world] {
    MultiverseGraph g = MultiverseGraph::from_json(slurp(*graph_file));
    GenericMultiverse gm = generic_multiverse(g, world_or_throw(g, *world));
    json j;
    j["start"] = *world;
    j["members"] = id_list(g, gm.members);
    j["generic_mantle"] = stringset_json(gm.generic_mantle);
    j["two_step"] = gm.two_step;
    j["two_step_missing"] = id_list(g, gm.two_step_missing);
    ctx.emit(j);
  });
}

void add_geo_inner_mantles(CLI::App& geo, Context& ctx) {
  auto* cmd = geo.add_subcommand("inner-mantles",
                                 "Iterate mantle realization to the core");
  auto graph_file = std::make_shared<std::string>();
  auto world = std::make_shared<std::string>();
  auto max_iter = std::make_shared<uint32_t>(64);
  auto expect_outcome = std::make_shared<std::string>();
  auto expect_trace = std::make_shared<std::string>();
  cmd->add_option("--graph", *graph_file, "World family file")->required();
  cmd->add_option("--world", *world, "World id")->required();
  cmd->add_option("--max-iter", *max_iter, "Iteration budget (default 64)");
  cmd->add_option("--expect-outcome", *expect_outcome, "Expected outcome")
      ->check(CLI::IsMember({"outer-core", "not-realized", "max-iterations"}));
  cmd->add_option("--expect-trace", *expect_trace,
                  "Expected trace, comma-separated world ids");
  cmd->callback([&ctx, graph_file, world, max_iter, expect_outcome,
                 expect_trace] {
    MultiverseGraph g = MultiverseGraph::from_json(slurp(*graph_file));
    MantleIteration r =
        inner_mantles(g, world_or_throw(g, *world), *max_iter);
    const char* outcome =
        r.outcome == MantleIterationOutcome::OuterCore      ? "outer-core"
        : r.outcome == MantleIterationOutcome::NotRealized  ? "not-realized"
                                                             : "max-iterations";
    json j;
    json trace = id_list(g, r.trace);
    j["trace"] = trace;
    j["outcome"] = outcome;
    j["final_mantle"] = stringset_json(r.final_mantle);
    bool pass = true;
    if (!expect_outcome->empty() && *expect_outcome != outcome) pass = false;
    if (!expect_trace->empty()) {
      auto want = split(*expect_trace, ',');
      if (trace.size() != want.size()) pass = false;
      for (std::size_t i = 0; pass && i < want.size(); ++i)
        if (trace[i].get<std::string>() != want[i]) pass = false;
    }
    if (!expect_outcome->empty() || !expect_trace->empty()) {
      j["pass"] = pass;
      ctx.check(pass);
    }
    ctx.emit(j);
  });
}

void add_geo_axioms(CLI::App& geo, Context& ctx) {
  auto* cmd = geo.add_subcommand("axioms",
                                 "Closure principles over a labeled family");
  auto labeled_file = std::make_shared<std::string>();
  cmd->add_option("--labeled", *labeled_file, "Labeled family file")
      ->required();
  cmd->callback([&ctx, labeled_file] {
    LabeledMultiverse m = LabeledMultiverse::from_json(slurp(*labeled_file));
    AxiomReport rep = check_multiverse_axioms(m);
    json j;
    j["all_pass"] = rep.all_pass();
    json checks = json::array();
    for (const auto& c : rep.checks) {
      json row;
      row["axiom"] = c.axiom;
      row["pass"] = c.pass;
      row["witness"] = c.witness;
      checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    j["notes"] = rep.notes;
    ctx.check(rep.all_pass());
    ctx.emit(j);
  });
}

}  // namespace

const std::vector<DispatchEntry>& dispatch_table() {
  static const std::vector<DispatchEntry> table = {
      {"modal parse",
       {"parse_formula", "render_formula", "subformulas", "substitute"}},
      {"modal decide", {"decide", "valid_on_frame"}},
      {"modal countermodel", {"find_countermodel", "eval"}},
      {"modal inclusions",
       {"verify_frame_inclusions", "enumerate_frames", "axiom_catalog"}},
      {"mv build", {"make_multiverse", "classify_frame", "quotient_poset"}},
      {"mv classify", {"classify_statement"}},
      {"mv trichotomy", {"check_trichotomy"}},
      {"mv independence", {"check_independence"}},
      {"mv maximality", {"check_maximality"}},
      {"mv simulate", {"simulate_kripke_model"}},
      {"bvm value", {"boolean_value"}},
      {"bvm equality", {"check_equality_laws"}},
      {"bvm full", {"check_fullness"}},
      {"bvm quotient", {"quotient_by_ultrafilter"}},
      {"bvm los", {"verify_los"}},
      {"bvm ultrapower", {"boolean_ultrapower"}},
      {"bvm generic", {"build_generic_filter"}},
      {"geo analyze", {"analyze_world"}},
      {"geo ddg", {"check_downward_directed"}},
      {"geo multiverse", {"generic_multiverse"}},
      {"geo inner-mantles", {"inner_mantles"}},
      {"geo axioms", {"check_multiverse_axioms"}},
  };
  return table;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Finite-model workbench: modal logics, button/switch "
               "multiverses, algebra-valued structures, world geology"};
  app.name("mvkit");
  app.require_subcommand(1);
  // Let --format appear after the subcommand as well as before it.
  app.fallthrough();

  Context ctx{out, err, "json", Limits::from_env(), 0};
  app.add_option("--format", ctx.format, "Output format (default json)")
      ->check(CLI::IsMember({"json", "text"}));

  auto* modal = app.add_subcommand("modal", "Formulas, theories and frames");
  modal->require_subcommand(1);
  add_modal_parse(*modal, ctx);
  add_modal_decide(*modal, ctx);
  add_modal_countermodel(*modal, ctx);
  add_modal_inclusions(*modal, ctx);

  auto* mv = app.add_subcommand("mv", "Button and switch multiverses");
  mv->require_subcommand(1);
  add_mv_build(*mv, ctx);
  add_mv_classify(*mv, ctx);
  add_mv_trichotomy(*mv, ctx);
  add_mv_independence(*mv, ctx);
  add_mv_maximality(*mv, ctx);
  add_mv_simulate(*mv, ctx);

  auto* bvm = app.add_subcommand("bvm", "Algebra-valued structures");
  bvm->require_subcommand(1);
  add_bvm_value(*bvm, ctx);
  add_bvm_equality(*bvm, ctx);
  add_bvm_full(*bvm, ctx);
  add_bvm_quotient(*bvm, ctx);
  add_bvm_los(*bvm, ctx);
  add_bvm_ultrapower(*bvm, ctx);
  add_bvm_generic(*bvm, ctx);

  auto* geo = app.add_subcommand("geo", "Grounds, mantles and multiverses");
  geo->require_subcommand(1);
  add_geo_analyze(*geo, ctx);
  add_geo_ddg(*geo, ctx);
  add_geo_multiverse(*geo, ctx);
  add_geo_inner_mantles(*geo, ctx);
  add_geo_axioms(*geo, ctx);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return ctx.exit_code;
}

}  // namespace mvk
