#include "mvk/kripke.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "json.hpp"

#include "mvk/errors.hpp"

namespace mvk {

Limits Limits::from_env() {
  Limits l;
  if (const char* v = std::getenv("MULTIVERSE_KIT_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end && *end == '\0' && parsed > 0) l.max_states = parsed;
  }
  return l;
}

uint64_t Frame::relation_mask() const {
  if (worlds > 8) throw CapExceeded("relation mask only defined for <= 8 worlds");
  uint64_t mask = 0;
  for (uint32_t a = 0; a < worlds; ++a)
    for (uint32_t b = 0; b < worlds; ++b)
      if (edge(a, b)) mask |= uint64_t{1} << (a * worlds + b);
  return mask;
}

Frame Frame::from_relation_mask(uint32_t worlds, uint64_t mask) {
  Frame fr(worlds);
  for (uint32_t a = 0; a < worlds; ++a)
    for (uint32_t b = 0; b < worlds; ++b)
      if (mask >> (a * worlds + b) & 1) fr.add_edge(a, b);
  return fr;
}

std::vector<std::pair<uint32_t, uint32_t>> Frame::edge_list() const {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t a = 0; a < worlds; ++a)
    for (uint32_t b = 0; b < worlds; ++b)
      if (edge(a, b)) out.emplace_back(a, b);
  return out;
}

KripkeModel::KripkeModel(Frame f, std::vector<std::string> names)
    : frame(std::move(f)), vars(std::move(names)) {
  truth.assign(vars.size(), WorldSet(frame.worlds));
}

int KripkeModel::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

void KripkeModel::set_true(const std::string& var, uint32_t world) {
  int i = var_index(var);
  if (i < 0)
    throw DomainError(DomainError::Kind::UnknownVariable,
                      "variable '" + var + "' is not declared in the model");
  truth[static_cast<std::size_t>(i)].set(world);
}

const char* frame_class_name(FrameClass c) {
  switch (c) {
    case FrameClass::Preorder: return "preorder";
    case FrameClass::DirectedPreorder: return "directed-preorder";
    case FrameClass::PreLattice: return "pre-lattice";
    case FrameClass::PreBooleanAlgebra: return "pre-boolean-algebra";
    case FrameClass::LinearPreorder: return "linear-preorder";
    case FrameClass::Total: return "total";
    case FrameClass::Transitive: return "transitive";
    case FrameClass::TransitiveIrreflexive: return "transitive-irreflexive";
    case FrameClass::Arbitrary: return "arbitrary";
  }
  return "?";
}

std::optional<FrameClass> frame_class_from_name(const std::string& name) {
  for (FrameClass c :
       {FrameClass::Preorder, FrameClass::DirectedPreorder,
        FrameClass::PreLattice, FrameClass::PreBooleanAlgebra,
        FrameClass::LinearPreorder, FrameClass::Total, FrameClass::Transitive,
        FrameClass::TransitiveIrreflexive, FrameClass::Arbitrary})
    if (name == frame_class_name(c)) return c;
  return std::nullopt;
}

namespace {

WorldSet box_set(const Frame& fr, const WorldSet& s) {
  WorldSet out(fr.worlds);
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (fr.succ[w].subset_of(s)) out.set(w);
  return out;
}

WorldSet dia_set(const Frame& fr, const WorldSet& s) {
  WorldSet out(fr.worlds);
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (fr.succ[w].intersects(s)) out.set(w);
  return out;
}

bool is_reflexive(const Frame& fr) {
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (!fr.edge(w, w)) return false;
  return true;
}

bool is_irreflexive(const Frame& fr) {
  for (uint32_t w = 0; w < fr.worlds; ++w)
    if (fr.edge(w, w)) return false;
  return true;
}

// wRu implies succ(u) subset of succ(w).
bool is_transitive(const Frame& fr) {
  for (uint32_t w = 0; w < fr.worlds; ++w)
    for (uint32_t u = 0; u < fr.worlds; ++u)
      if (fr.edge(w, u) && !fr.succ[u].subset_of(fr.succ[w])) return false;
  return true;
}

// Any two successors of a common world have a common successor.
bool is_convergent(const Frame& fr) {
  for (uint32_t w = 0; w < fr.worlds; ++w) {
    auto members = fr.succ[w].members();
    for (uint32_t u : members)
      for (uint32_t v : members)
        if (!fr.succ[u].intersects(fr.succ[v])) return false;
  }
  return true;
}

bool is_total(const Frame& fr) {
  for (uint32_t a = 0; a < fr.worlds; ++a)
    for (uint32_t b = 0; b < fr.worlds; ++b)
      if (!fr.edge(a, b)) return false;
  return true;
}

bool is_linear(const Frame& fr) {
  for (uint32_t a = 0; a < fr.worlds; ++a)
    for (uint32_t b = 0; b < fr.worlds; ++b)
      if (!fr.edge(a, b) && !fr.edge(b, a)) return false;
  return true;
}

// Least upper bound: an upper bound below every upper bound. Unique when it
// exists, by antisymmetry.
std::optional<uint32_t> poset_join(const ClusterPoset& q, uint32_t a,
                                   uint32_t b) {
  for (uint32_t c = 0; c < q.clusters; ++c) {
    if (!q.leq[a][c] || !q.leq[b][c]) continue;
    bool least = true;
    for (uint32_t d = 0; d < q.clusters; ++d)
      if (q.leq[a][d] && q.leq[b][d] && !q.leq[c][d]) least = false;
    if (least) return c;
  }
  return std::nullopt;
}

std::optional<uint32_t> poset_meet(const ClusterPoset& q, uint32_t a,
                                   uint32_t b) {
  for (uint32_t c = 0; c < q.clusters; ++c) {
    if (!q.leq[c][a] || !q.leq[c][b]) continue;
    bool greatest = true;
    for (uint32_t d = 0; d < q.clusters; ++d)
      if (q.leq[d][a] && q.leq[d][b] && !q.leq[d][c]) greatest = false;
    if (greatest) return c;
  }
  return std::nullopt;
}

struct Evaluator {
  const KripkeModel& m;

  WorldSet run(const Formula& f) const {
    switch (f.kind()) {
      case Formula::Kind::Var: {
        int i = m.var_index(f.name());
        if (i < 0)
          throw DomainError(DomainError::Kind::UnknownVariable,
                            "variable '" + f.name() + "' has no valuation");
        return m.truth[static_cast<std::size_t>(i)];
      }
      case Formula::Kind::Top: return WorldSet::all(m.frame.worlds);
      case Formula::Kind::Bot: return WorldSet(m.frame.worlds);
      case Formula::Kind::Not: return run(f.child()).complement();
      case Formula::Kind::And: return run(f.child(0)) & run(f.child(1));
      case Formula::Kind::Or: return run(f.child(0)) | run(f.child(1));
      case Formula::Kind::Imp:
        return run(f.child(0)).complement() | run(f.child(1));
      case Formula::Kind::Iff:
        return (run(f.child(0)) ^ run(f.child(1))).complement();
      case Formula::Kind::Box: return box_set(m.frame, run(f.child()));
      case Formula::Kind::Dia: return dia_set(m.frame, run(f.child()));
    }
    throw Error("unreachable");
  }
};

}  // namespace

WorldSet eval_set(const KripkeModel& m, const Formula& f) {
  return Evaluator{m}.run(f);
}

bool eval(const KripkeModel& m, uint32_t world, const Formula& f) {
  if (world >= m.frame.worlds)
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  return eval_set(m, f).test(world);
}

bool valid_on_frame(const Frame& fr, const Formula& f, const Limits& limits) {
  std::vector<std::string> vars = variables(f);
  uint64_t bits =
      static_cast<uint64_t>(fr.worlds) * static_cast<uint64_t>(vars.size());
  if (bits > limits.max_valuation_bits)
    throw CapExceeded("valuation sweep needs 2^" + std::to_string(bits) +
                      " assignments, cap is 2^" +
                      std::to_string(limits.max_valuation_bits));
  WorldSet everywhere = WorldSet::all(fr.worlds);
  KripkeModel m(fr, vars);
  for (uint64_t val = 0; val < (uint64_t{1} << bits); ++val) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      WorldSet t(fr.worlds);
      for (uint32_t w = 0; w < fr.worlds; ++w)
        if (val >> (i * fr.worlds + w) & 1) t.set(w);
      m.truth[i] = t;
    }
    if (!(eval_set(m, f) == everywhere)) return false;
  }
  return true;
}

ClusterPoset quotient_poset(const Frame& fr) {
  if (!is_reflexive(fr) || !is_transitive(fr))
    throw DomainError(DomainError::Kind::NotAPreorder,
                      "cluster quotient requires a reflexive transitive frame");
  ClusterPoset q;
  q.cluster_of.assign(fr.worlds, UINT32_MAX);
  for (uint32_t w = 0; w < fr.worlds; ++w) {
    if (q.cluster_of[w] != UINT32_MAX) continue;
    uint32_t id = q.clusters++;
    q.members.emplace_back();
    for (uint32_t v = w; v < fr.worlds; ++v)
      if (fr.edge(w, v) && fr.edge(v, w)) {
        q.cluster_of[v] = id;
        q.members[id].push_back(v);
      }
  }
  q.leq.assign(q.clusters, std::vector<bool>(q.clusters, false));
  for (uint32_t a = 0; a < q.clusters; ++a)
    for (uint32_t b = 0; b < q.clusters; ++b)
      q.leq[a][b] = fr.edge(q.members[a][0], q.members[b][0]);
  return q;
}

bool poset_is_lattice(const ClusterPoset& q) {
  for (uint32_t a = 0; a < q.clusters; ++a)
    for (uint32_t b = a + 1; b < q.clusters; ++b)
      if (!poset_join(q, a, b) || !poset_meet(q, a, b)) return false;
  return true;
}

std::optional<std::vector<uint32_t>> powerset_pattern(const ClusterPoset& q) {
  // Bottom: the unique cluster below every other one.
  std::optional<uint32_t> bottom;
  for (uint32_t c = 0; c < q.clusters; ++c) {
    bool below_all = true;
    for (uint32_t d = 0; d < q.clusters; ++d)
      if (!q.leq[c][d]) below_all = false;
    if (below_all) bottom = c;
  }
  if (!bottom) return std::nullopt;
  // Atoms: covers of bottom.
  std::vector<uint32_t> atoms;
  for (uint32_t c = 0; c < q.clusters; ++c) {
    if (c == *bottom) continue;
    bool cover = true;
    for (uint32_t d = 0; d < q.clusters; ++d)
      if (d != *bottom && d != c && q.leq[d][c]) cover = false;
    if (cover) atoms.push_back(c);
  }
  if (atoms.size() >= 32) return std::nullopt;
  if (q.clusters != (uint32_t{1} << atoms.size())) return std::nullopt;
  std::vector<uint32_t> pattern(q.clusters, 0);
  for (uint32_t c = 0; c < q.clusters; ++c)
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (q.leq[atoms[i]][c]) pattern[c] |= uint32_t{1} << i;
  // Pattern map must be an order isomorphism onto the full subset order.
  std::vector<bool> seen(q.clusters, false);
  for (uint32_t c = 0; c < q.clusters; ++c) {
    if (seen[pattern[c]]) return std::nullopt;
    seen[pattern[c]] = true;
  }
  for (uint32_t a = 0; a < q.clusters; ++a)
    for (uint32_t b = 0; b < q.clusters; ++b) {
      bool subset = (pattern[a] & ~pattern[b]) == 0;
      if (q.leq[a][b] != subset) return std::nullopt;
    }
  return pattern;
}

bool frame_in_class(const Frame& fr, FrameClass c) {
  switch (c) {
    case FrameClass::Arbitrary:
      return true;
    case FrameClass::Preorder:
      return is_reflexive(fr) && is_transitive(fr);
    case FrameClass::DirectedPreorder:
      return frame_in_class(fr, FrameClass::Preorder) && is_convergent(fr);
    case FrameClass::PreLattice:
      return frame_in_class(fr, FrameClass::Preorder) &&
             poset_is_lattice(quotient_poset(fr));
    case FrameClass::PreBooleanAlgebra:
      return frame_in_class(fr, FrameClass::Preorder) &&
             powerset_pattern(quotient_poset(fr)).has_value();
    case FrameClass::LinearPreorder:
      return frame_in_class(fr, FrameClass::Preorder) && is_linear(fr);
    case FrameClass::Total:
      return is_total(fr);
    case FrameClass::Transitive:
      return is_transitive(fr);
    case FrameClass::TransitiveIrreflexive:
      return is_transitive(fr) && is_irreflexive(fr);
  }
  return false;
}

std::set<FrameClass> classify_frame(const Frame& fr) {
  std::set<FrameClass> out;
  for (FrameClass c :
       {FrameClass::Preorder, FrameClass::DirectedPreorder,
        FrameClass::PreLattice, FrameClass::PreBooleanAlgebra,
        FrameClass::LinearPreorder, FrameClass::Total, FrameClass::Transitive,
        FrameClass::TransitiveIrreflexive})
    if (frame_in_class(fr, c)) out.insert(c);
  return out;
}

namespace {

uint64_t permuted_mask(uint64_t mask, uint32_t n,
                       const std::vector<uint32_t>& perm) {
  uint64_t out = 0;
  for (uint32_t a = 0; a < n; ++a)
    for (uint32_t b = 0; b < n; ++b)
      if (mask >> (a * n + b) & 1)
        out |= uint64_t{1} << (perm[a] * n + perm[b]);
  return out;
}

bool mask_is_canonical(uint64_t mask, uint32_t n) {
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end()))
    if (permuted_mask(mask, n, perm) < mask) return false;
  return true;
}

}  // namespace

void enumerate_frames(uint32_t max_worlds, FrameClass c, bool dedup_isomorphic,
                      const std::function<bool(const Frame&)>& visitor,
                      const Limits& limits) {
  if (max_worlds > limits.max_enum_worlds)
    throw CapExceeded("frame enumeration capped at " +
                      std::to_string(limits.max_enum_worlds) + " worlds");
  for (uint32_t n = 1; n <= max_worlds; ++n) {
    uint64_t total = uint64_t{1} << (n * n);
    for (uint64_t mask = 0; mask < total; ++mask) {
      if (dedup_isomorphic && !mask_is_canonical(mask, n)) continue;
      Frame fr = Frame::from_relation_mask(n, mask);
      if (!frame_in_class(fr, c)) continue;
      if (!visitor(fr)) return;
    }
  }
}

std::vector<Frame> enumerate_frames(uint32_t max_worlds, FrameClass c,
                                    bool dedup_isomorphic,
                                    const Limits& limits) {
  std::vector<Frame> out;
  enumerate_frames(
      max_worlds, c, dedup_isomorphic,
      [&out](const Frame& fr) {
        out.push_back(fr);
        return true;
      },
      limits);
  return out;
}

KripkeModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(DomainError::Kind::BadInput,
                      std::string("bad model JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("worlds") || !j["worlds"].is_number_unsigned())
    throw DomainError(DomainError::Kind::BadInput,
                      "model JSON needs an unsigned \"worlds\" field");
  uint32_t n = j["worlds"].get<uint32_t>();
  Frame fr(n);
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    if (!e.is_array() || e.size() != 2)
      throw DomainError(DomainError::Kind::BadInput, "edges must be [i,j] pairs");
    uint32_t a = e[0].get<uint32_t>(), b = e[1].get<uint32_t>();
    if (a >= n || b >= n)
      throw DomainError(DomainError::Kind::BadInput, "edge world out of range");
    fr.add_edge(a, b);
  }
  std::vector<std::string> vars;
  auto valuation = j.value("valuation", nlohmann::json::object());
  for (auto it = valuation.begin(); it != valuation.end(); ++it)
    vars.push_back(it.key());
  KripkeModel m(std::move(fr), std::move(vars));
  for (auto it = valuation.begin(); it != valuation.end(); ++it)
    for (const auto& w : it.value()) {
      uint32_t world = w.get<uint32_t>();
      if (world >= n)
        throw DomainError(DomainError::Kind::BadInput,
                          "valuation world out of range");
      m.set_true(it.key(), world);
    }
  return m;
}

std::string model_to_json(const KripkeModel& m) {
  nlohmann::json j;
  j["worlds"] = m.frame.worlds;
  auto edges = nlohmann::json::array();
  for (auto [a, b] : m.frame.edge_list()) edges.push_back({a, b});
  j["edges"] = edges;
  auto valuation = nlohmann::json::object();
  for (std::size_t i = 0; i < m.vars.size(); ++i)
    valuation[m.vars[i]] = m.truth[i].members();
  j["valuation"] = valuation;
  return j.dump();
}

}  // namespace mvk
