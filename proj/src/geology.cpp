#include "mvk/geology.hpp"

#include <algorithm>

#include "mvk/errors.hpp"
#include "json.hpp"

namespace mvk {

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(DomainError::Kind::BadInput,
                      std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw DomainError(DomainError::Kind::BadInput,
                      std::string(what) + " must be a JSON object");
  return j;
}

}  // namespace

int MultiverseGraph::world_index(const std::string& id) const {
  for (std::size_t i = 0; i < worlds.size(); ++i)
    if (worlds[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<uint32_t> MultiverseGraph::grounds_of(uint32_t v) const {
  std::vector<uint32_t> out;
  for (uint32_t u = 0; u < size(); ++u)
    if (ground[u][v]) out.push_back(u);
  return out;
}

std::vector<uint32_t> MultiverseGraph::extensions_of(uint32_t v) const {
  std::vector<uint32_t> out;
  for (uint32_t e = 0; e < size(); ++e)
    if (ground[v][e]) out.push_back(e);
  return out;
}

std::set<std::string> MultiverseGraph::mantle_of(uint32_t v) const {
  std::set<std::string> mantle = worlds[v].content;
  for (uint32_t u : grounds_of(v)) {
    std::set<std::string> next;
    std::set_intersection(mantle.begin(), mantle.end(),
                          worlds[u].content.begin(), worlds[u].content.end(),
                          std::inserter(next, next.begin()));
    mantle = std::move(next);
  }
  return mantle;
}

MultiverseGraph MultiverseGraph::from_json(const std::string& text) {
  json j = parse_object(text, "a world family");
  if (!j.contains("worlds") || !j["worlds"].is_array() || j["worlds"].empty())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"worlds\" must be a nonempty array");
  MultiverseGraph g;
  for (const auto& w : j["worlds"]) {
    if (!w.is_object() || !w.contains("id") || !w["id"].is_string() ||
        !w.contains("content") || !w["content"].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        "each world needs an \"id\" and a \"content\" array");
    MultiverseWorld world;
    world.id = w["id"].get<std::string>();
    if (g.world_index(world.id) >= 0)
      throw DomainError(DomainError::Kind::BadInput,
                        "duplicate world id: " + world.id);
    for (const auto& s : w["content"]) {
      if (!s.is_string())
        throw DomainError(DomainError::Kind::BadInput,
                          "\"content\" must be an array of strings");
      world.content.insert(s.get<std::string>());
    }
    g.worlds.push_back(std::move(world));
  }
  uint32_t n = g.size();
  g.ground.assign(n, std::vector<bool>(n, false));
  for (uint32_t i = 0; i < n; ++i) g.ground[i][i] = true;
  if (j.contains("ground")) {
    if (!j["ground"].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"ground\" must be an array of id pairs");
    for (const auto& e : j["ground"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string())
        throw DomainError(DomainError::Kind::BadInput,
                          "\"ground\" must be an array of id pairs");
      int a = g.world_index(e[0].get<std::string>());
      int b = g.world_index(e[1].get<std::string>());
      if (a < 0 || b < 0)
        throw DomainError(DomainError::Kind::BadInput,
                          "ground pair names an unknown world");
      g.ground[a][b] = true;
    }
  }
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = 0; v < n; ++v) {
      if (!g.ground[u][v]) continue;
      if (u != v && g.ground[v][u])
        throw DomainError(DomainError::Kind::InvariantViolation,
                          "ground cycle between " + g.worlds[u].id + " and " +
                              g.worlds[v].id);
      for (uint32_t w = 0; w < n; ++w)
        if (g.ground[v][w] && !g.ground[u][w])
          throw DomainError(
              DomainError::Kind::InvariantViolation,
              "ground relation is not transitive: " + g.worlds[u].id +
                  " grounds " + g.worlds[v].id + " grounds " + g.worlds[w].id);
      for (const auto& s : g.worlds[u].content)
        if (!g.worlds[v].content.count(s))
          throw DomainError(DomainError::Kind::InvariantViolation,
                            "ground " + g.worlds[u].id + " has \"" + s +
                                "\" outside its extension " + g.worlds[v].id);
    }
  return g;
}

WorldAnalysis analyze_world(const MultiverseGraph& g, uint32_t v) {
  if (v >= g.size())
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  WorldAnalysis a;
  a.world = v;
  a.grounds = g.grounds_of(v);
  a.extensions = g.extensions_of(v);
  for (uint32_t u : a.grounds)
    if (g.grounds_of(u).size() == 1) a.bedrocks.push_back(u);
  a.ground_axiom = a.grounds.size() == 1;
  a.mantle = g.mantle_of(v);
  for (uint32_t w = 0; w < g.size(); ++w)
    if (g.worlds[w].content == a.mantle) {
      a.mantle_world = w;
      break;
    }
  return a;
}

DirectednessReport check_downward_directed(const MultiverseGraph& g) {
  DirectednessReport rep;
  rep.note =
      "pairwise directedness extends to finite sets of grounds: a common "
      "ground of two grounds is again a ground of the same world";
  for (uint32_t v = 0; v < g.size(); ++v) {
    auto grounds = g.grounds_of(v);
    bool failed = false;
    for (std::size_t i = 0; i < grounds.size() && !failed; ++i)
      for (std::size_t j = i + 1; j < grounds.size() && !failed; ++j) {
        bool common = false;
        for (uint32_t t = 0; t < g.size() && !common; ++t)
          common = g.ground[t][grounds[i]] && g.ground[t][grounds[j]];
        if (!common) {
          failed = true;
          if (!rep.witness_pair) rep.witness_pair = {grounds[i], grounds[j]};
        }
      }
    if (failed) {
      rep.holds_everywhere = false;
      rep.failing_worlds.push_back(v);
    }
  }
  return rep;
}

GenericMultiverse generic_multiverse(const MultiverseGraph& g, uint32_t v) {
  if (v >= g.size())
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  GenericMultiverse out;
  out.start = v;
  std::vector<bool> in(g.size(), false);
  std::vector<uint32_t> queue = {v};
  in[v] = true;
  while (!queue.empty()) {
    uint32_t w = queue.back();
    queue.pop_back();
    for (uint32_t u = 0; u < g.size(); ++u)
      if ((g.ground[u][w] || g.ground[w][u]) && !in[u]) {
        in[u] = true;
        queue.push_back(u);
      }
  }
  for (uint32_t u = 0; u < g.size(); ++u)
    if (in[u]) out.members.push_back(u);

  std::vector<bool> updown(g.size(), false);
  for (uint32_t e = 0; e < g.size(); ++e) {
    if (!g.ground[v][e]) continue;
    for (uint32_t u = 0; u < g.size(); ++u)
      if (g.ground[u][e]) updown[u] = true;
  }
  bool first = true;
  for (uint32_t u = 0; u < g.size(); ++u) {
    if (!updown[u]) continue;
    if (first) {
      out.generic_mantle = g.worlds[u].content;
      first = false;
    } else {
      std::set<std::string> next;
      std::set_intersection(out.generic_mantle.begin(),
                            out.generic_mantle.end(),
                            g.worlds[u].content.begin(),
                            g.worlds[u].content.end(),
                            std::inserter(next, next.begin()));
      out.generic_mantle = std::move(next);
    }
  }
  for (uint32_t u : out.members)
    if (!updown[u]) {
      out.two_step = false;
      out.two_step_missing.push_back(u);
    }
  return out;
}

MantleIteration inner_mantles(const MultiverseGraph& g, uint32_t start,
                              uint32_t max_iter) {
  if (start >= g.size())
    throw DomainError(DomainError::Kind::BadInput, "world index out of range");
  MantleIteration out;
  out.trace.push_back(start);
  for (uint32_t step = 0; step < max_iter; ++step) {
    uint32_t cur = out.trace.back();
    out.final_mantle = g.mantle_of(cur);
    if (out.final_mantle == g.worlds[cur].content) {
      out.outcome = MantleIterationOutcome::OuterCore;
      return out;
    }
    std::optional<uint32_t> next;
    for (uint32_t w = 0; w < g.size() && !next; ++w)
      if (g.worlds[w].content == out.final_mantle) next = w;
    if (!next) {
      out.outcome = MantleIterationOutcome::NotRealized;
      return out;
    }
    out.trace.push_back(*next);
  }
  out.outcome = MantleIterationOutcome::MaxIter;
  return out;
}

int LabeledMultiverse::world_index(const std::string& id) const {
  for (std::size_t i = 0; i < worlds.size(); ++i)
    if (worlds[i] == id) return static_cast<int>(i);
  return -1;
}

LabeledMultiverse LabeledMultiverse::from_json(const std::string& text) {
  json j = parse_object(text, "a labeled family");
  if (!j.contains("worlds") || !j["worlds"].is_array() || j["worlds"].empty())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"worlds\" must be a nonempty array");
  LabeledMultiverse m;
  for (const auto& w : j["worlds"]) {
    if (!w.is_string())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"worlds\" must be an array of ids");
    if (m.world_index(w.get<std::string>()) >= 0)
      throw DomainError(DomainError::Kind::BadInput,
                        "duplicate world id: " + w.get<std::string>());
    m.worlds.push_back(w.get<std::string>());
  }
  auto read_pairs = [&](const char* key,
                        std::vector<std::pair<uint32_t, uint32_t>>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        std::string("\"") + key + "\" must be an array of id pairs");
    for (const auto& e : j[key]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string())
        throw DomainError(DomainError::Kind::BadInput,
                          std::string("\"") + key +
                              "\" must be an array of id pairs");
      int a = m.world_index(e[0].get<std::string>());
      int b = m.world_index(e[1].get<std::string>());
      if (a < 0 || b < 0)
        throw DomainError(DomainError::Kind::BadInput,
                          std::string(key) + " pair names an unknown world");
      out.emplace_back(a, b);
    }
  };
  read_pairs("ground", m.ground);
  // Every world trivially grounds itself; spare fixtures the diagonal.
  for (uint32_t w = 0; w < m.worlds.size(); ++w)
    if (!std::count(m.ground.begin(), m.ground.end(),
                    std::pair<uint32_t, uint32_t>{w, w}))
      m.ground.emplace_back(w, w);
  read_pairs("forcing_ext", m.forcing_ext);
  read_pairs("defines", m.defines);
  read_pairs("reflects", m.reflects);
  read_pairs("countable_in", m.countable_in);
  read_pairs("illfounded_in", m.illfounded_in);
  read_pairs("absorbed_L", m.absorbed_l);
  if (j.contains("embeds")) {
    if (!j["embeds"].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"embeds\" must be an array of records");
    for (const auto& e : j["embeds"]) {
      if (!e.is_object() || !e.contains("id") || !e["id"].is_string() ||
          !e.contains("from") || !e["from"].is_string() ||
          !e.contains("to") || !e["to"].is_string())
        throw DomainError(DomainError::Kind::BadInput,
                          "each embed needs \"id\", \"from\" and \"to\"");
      EmbedRecord rec;
      rec.id = e["id"].get<std::string>();
      rec.from = e["from"].get<std::string>();
      rec.to = e["to"].get<std::string>();
      if (m.world_index(rec.from) < 0 || m.world_index(rec.to) < 0)
        throw DomainError(DomainError::Kind::BadInput,
                          "embed " + rec.id + " names an unknown world");
      for (const auto& other : m.embeds)
        if (other.id == rec.id)
          throw DomainError(DomainError::Kind::BadInput,
                            "duplicate embed id: " + rec.id);
      if (e.contains("iterate_of")) {
        if (!e["iterate_of"].is_string())
          throw DomainError(DomainError::Kind::BadInput,
                            "\"iterate_of\" must be an embed id");
        rec.iterate_of = e["iterate_of"].get<std::string>();
      }
      m.embeds.push_back(std::move(rec));
    }
  }
  return m;
}

bool AxiomReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AxiomCheck& c) { return c.pass; });
}

AxiomReport check_multiverse_axioms(const LabeledMultiverse& m) {
  AxiomReport rep;
  rep.notes.push_back(
      "ground cycles are permitted: a finite family can only satisfy these "
      "closure principles with them");
  rep.notes.push_back(
      "every forcing-extension pair must also be a ground pair");

  auto has_pair = [](const std::vector<std::pair<uint32_t, uint32_t>>& rel,
                     uint32_t a, uint32_t b) {
    for (const auto& [x, y] : rel)
      if (x == a && y == b) return true;
    return false;
  };
  auto forall_exists = [&](const char* axiom,
                           const std::vector<std::pair<uint32_t, uint32_t>>& rel,
                           bool allow_self) {
    AxiomCheck c;
    c.axiom = axiom;
    for (uint32_t w = 0; w < m.worlds.size() && c.pass; ++w) {
      bool found = false;
      for (const auto& [a, b] : rel)
        if (a == w && (allow_self || b != w)) {
          found = true;
          break;
        }
      if (!found) {
        c.pass = false;
        c.witness = "no witness for world " + m.worlds[w];
      }
    }
    rep.checks.push_back(std::move(c));
  };

  {
    AxiomCheck c;
    c.axiom = "realizability";
    c.witness = std::to_string(m.defines.size()) +
                " interpreted-model references, all inside the family";
    rep.checks.push_back(std::move(c));
  }
  {
    AxiomCheck c;
    c.axiom = "forcing-extension";
    for (const auto& [a, b] : m.forcing_ext)
      if (!has_pair(m.ground, a, b)) {
        c.pass = false;
        c.witness = "forcing extension " + m.worlds[a] + " -> " + m.worlds[b] +
                    " is not a ground pair";
        break;
      }
    if (c.pass)
      for (uint32_t w = 0; w < m.worlds.size() && c.pass; ++w) {
        bool found = false;
        for (const auto& [a, b] : m.forcing_ext)
          if (a == w) {
            found = true;
            break;
          }
        if (!found) {
          c.pass = false;
          c.witness = "world " + m.worlds[w] + " has no forcing extension";
        }
      }
    rep.checks.push_back(std::move(c));
  }
  forall_exists("reflection", m.reflects, false);
  forall_exists("countability", m.countable_in, false);
  forall_exists("wellfoundedness-mirage", m.illfounded_in, false);
  {
    AxiomCheck c;
    c.axiom = "reverse-embedding";
    for (const auto& e : m.embeds) {
      if (!e.iterate_of) {
        c.pass = false;
        c.witness = "embedding " + e.id + " is not an iterate of anything";
        break;
      }
      bool found = false;
      for (const auto& other : m.embeds)
        if (other.id == *e.iterate_of) {
          found = true;
          break;
        }
      if (!found) {
        c.pass = false;
        c.witness = "embedding " + e.id + " iterates the unknown record " +
                    *e.iterate_of;
        break;
      }
    }
    rep.checks.push_back(std::move(c));
  }
  forall_exists("absorption", m.absorbed_l, false);
  return rep;
}

}  // namespace mvk
