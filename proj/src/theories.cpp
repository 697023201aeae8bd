#include "mvk/theories.hpp"

#include <algorithm>
#include <map>

#include "mvk/errors.hpp"

namespace mvk {

namespace {

std::vector<NamedAxiom> build_axioms() {
  auto ax = [](const char* name, const char* text) {
    return NamedAxiom{name, AxiomScheme{name, parse_formula(text)}};
  };
  return {
      ax("K", "[](p -> q) -> ([]p -> []q)"),
      ax("Dual", "[]~p <-> ~<>p"),
      ax("S", "[]p -> p"),
      ax("4", "[]p -> [][]p"),
      ax(".2", "<>[]p -> []<>p"),
      ax("5", "<>[]p -> p"),
      ax("M", "[]<>p -> <>[]p"),
      ax("W5", "<>[]p -> (p -> []p)"),
      ax(".3", "<>p & <>q -> (<>(p & <>q) | <>(p & q) | <>(q & <>p))"),
      ax("Dm", "[]([](p -> []p) -> p) -> (<>[]p -> p)"),
      ax("Grz", "[]([](p -> []p) -> p) -> p"),
      ax("Lob", "[]([]p -> p) -> []p"),
      ax("H", "p -> [](<>p -> p)"),
  };
}

std::vector<ModalTheory> build_theories() {
  using FC = FrameClass;
  std::vector<std::string> k = {"K", "Dual"};
  auto plus = [](std::vector<std::string> base,
                 std::initializer_list<const char*> extra) {
    for (const char* e : extra) base.emplace_back(e);
    return base;
  };
  std::vector<std::string> k4 = plus(k, {"4"});
  std::vector<std::string> s4 = plus(k4, {"S"});
  return {
      {"K", k, FC::Arbitrary},
      {"K4", k4, FC::Transitive},
      {"S4", s4, FC::Preorder},
      {"S4.2", plus(s4, {".2"}), FC::DirectedPreorder},
      {"S4.3", plus(s4, {".3"}), FC::LinearPreorder},
      {"S4W5", plus(s4, {"W5"}), std::nullopt},
      {"S5", plus(s4, {"5"}), FC::Total},
      {"S4.1", plus(s4, {"M"}), std::nullopt},
      {"S4.2.1", plus(s4, {".2", "M"}), std::nullopt},
      {"Dm", plus(s4, {"Dm"}), std::nullopt},
      {"Dm.2", plus(s4, {".2", "Dm"}), std::nullopt},
      {"Grz", plus(k, {"Grz"}), std::nullopt},
      {"GL", plus(k4, {"Lob"}), FC::TransitiveIrreflexive},
      {"K4H", plus(k4, {"H"}), std::nullopt},
  };
}

}  // namespace

const std::vector<NamedAxiom>& axiom_catalog() {
  static const std::vector<NamedAxiom> catalog = build_axioms();
  return catalog;
}

const NamedAxiom& axiom_by_name(const std::string& name) {
  for (const auto& a : axiom_catalog())
    if (a.name == name) return a;
  // Accept the unicode spelling of the provability axiom.
  if (name == "Löb") return axiom_by_name("Lob");
  throw DomainError(DomainError::Kind::BadInput,
                    "unknown axiom '" + name + "'");
}

const std::vector<ModalTheory>& theory_catalog() {
  static const std::vector<ModalTheory> catalog = build_theories();
  return catalog;
}

const ModalTheory& theory_by_name(const std::string& name) {
  for (const auto& t : theory_catalog())
    if (t.name == name) return t;
  throw DomainError(DomainError::Kind::BadInput,
                    "unknown theory '" + name + "'");
}

namespace {

// First counterexample in (world count, relation mask, valuation bits, world)
// order, or nothing.
std::optional<std::pair<KripkeModel, uint32_t>> search_counterexample(
    FrameClass c, const Formula& f, uint32_t max_worlds, const Limits& limits) {
  std::vector<std::string> vars = variables(f);
  std::optional<std::pair<KripkeModel, uint32_t>> found;
  enumerate_frames(
      max_worlds, c, false,
      [&](const Frame& fr) {
        uint64_t bits = static_cast<uint64_t>(fr.worlds) * vars.size();
        if (bits > limits.max_valuation_bits)
          throw CapExceeded("counterexample sweep exceeds the valuation cap");
        KripkeModel m(fr, vars);
        for (uint64_t val = 0; val < (uint64_t{1} << bits); ++val) {
          for (std::size_t i = 0; i < vars.size(); ++i) {
            WorldSet t(fr.worlds);
            for (uint32_t w = 0; w < fr.worlds; ++w)
              if (val >> (i * fr.worlds + w) & 1) t.set(w);
            m.truth[i] = t;
          }
          WorldSet holds = eval_set(m, f);
          for (uint32_t w = 0; w < fr.worlds; ++w)
            if (!holds.test(w)) {
              found = {m, w};
              return false;
            }
        }
        return true;
      },
      limits);
  return found;
}

}  // namespace

Verdict decide(const ModalTheory& theory, const Formula& f, uint32_t bound,
               const DecideOptions& opts) {
  if (!theory.frame_class)
    throw DomainError(DomainError::Kind::BadInput,
                      "theory '" + theory.name +
                          "' has no frame class to search");
  auto hit = search_counterexample(*theory.frame_class, f, bound, opts.limits);
  if (hit) {
    Verdict v;
    v.kind = Verdict::Kind::Refuted;
    v.model = hit->first;
    v.world = hit->second;
    return v;
  }
  Verdict v;
  v.searched_bound = bound;
  std::size_t parts = subformulas(f).size();
  v.complete = parts < 32 && bound >= (uint64_t{1} << parts);
  v.kind = (!v.complete && opts.unknown_on_incomplete) ? Verdict::Kind::Unknown
                                                       : Verdict::Kind::Valid;
  return v;
}

std::optional<std::pair<KripkeModel, uint32_t>> find_countermodel(
    FrameClass c, const Formula& f, uint32_t max_worlds, const Limits& limits) {
  auto hit = search_counterexample(c, f, max_worlds, limits);
  if (hit && eval(hit->first, hit->second, f))
    throw Error("countermodel failed re-verification");
  return hit;
}

const std::vector<DiagramEdge>& theory_diagram() {
  static const std::vector<DiagramEdge> edges = {
      {"S5", "S4W5"},     {"S4W5", "S4.3"},  {"S4W5", "Dm.2"},
      {"S4.2.1", "S4.1"}, {"S4.2.1", "S4.2"}, {"S4.3", "S4.2"},
      {"Dm.2", "S4.2"},   {"Dm.2", "Dm"},    {"Grz", "Dm"},
      {"S4.1", "S4"},     {"S4.2", "S4"},    {"Dm", "S4"},
      {"K4H", "K4"},      {"GL", "K4"},      {"S4", "K4"},
      {"K4", "K"},
  };
  return edges;
}

bool DiagramReport::all_pass() const {
  return std::all_of(edges.begin(), edges.end(), [](const EdgeCheck& e) {
    return e.inclusion_holds && e.strictness_witness.has_value();
  });
}

DiagramReport verify_frame_inclusions(uint32_t max_worlds,
                                      const Limits& limits) {
  const auto& axioms = axiom_catalog();
  // axiom validity bitmap per frame, one frame per isomorphism class
  std::vector<Frame> frames =
      enumerate_frames(max_worlds, FrameClass::Arbitrary, true, limits);
  std::vector<uint32_t> valid_mask(frames.size(), 0);
  for (std::size_t i = 0; i < frames.size(); ++i)
    for (std::size_t a = 0; a < axioms.size(); ++a)
      if (valid_on_frame(frames[i], axioms[a].scheme.templ, limits))
        valid_mask[i] |= uint32_t{1} << a;

  auto theory_mask = [&](const std::string& name) {
    uint32_t mask = 0;
    for (const std::string& ax : theory_by_name(name).axioms)
      for (std::size_t a = 0; a < axioms.size(); ++a)
        if (axioms[a].name == ax) mask |= uint32_t{1} << a;
    return mask;
  };

  DiagramReport report;
  report.max_worlds = max_worlds;
  report.frames_checked = frames.size();
  for (const DiagramEdge& edge : theory_diagram()) {
    uint32_t strong = theory_mask(edge.stronger);
    uint32_t weak = theory_mask(edge.weaker);
    EdgeCheck check;
    check.edge = edge;
    check.inclusion_holds = true;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      bool strong_valid = (valid_mask[i] & strong) == strong;
      bool weak_valid = (valid_mask[i] & weak) == weak;
      if (strong_valid && !weak_valid) check.inclusion_holds = false;
      if (weak_valid && !strong_valid && !check.strictness_witness)
        check.strictness_witness = frames[i];
    }
    report.edges.push_back(std::move(check));
  }
  return report;
}

}  // namespace mvk
