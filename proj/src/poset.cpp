#include "mvk/poset.hpp"

#include <algorithm>
#include <set>

#include "mvk/errors.hpp"
#include "json.hpp"

namespace mvk {

Poset Poset::from_pairs(
    std::vector<std::string> conditions,
    const std::vector<std::pair<uint32_t, uint32_t>>& pairs) {
  Poset p;
  p.conditions = std::move(conditions);
  uint32_t n = p.size();
  if (n == 0)
    throw DomainError(DomainError::Kind::BadInput, "poset must be nonempty");
  std::set<std::string> seen;
  for (const auto& c : p.conditions)
    if (!seen.insert(c).second)
      throw DomainError(DomainError::Kind::BadInput,
                        "duplicate condition: " + c);
  p.leq.assign(n, std::vector<bool>(n, false));
  for (uint32_t i = 0; i < n; ++i) p.leq[i][i] = true;
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n)
      throw DomainError(DomainError::Kind::BadInput,
                        "leq pair index out of range");
    p.leq[a][b] = true;
  }
  for (uint32_t k = 0; k < n; ++k)
    for (uint32_t i = 0; i < n; ++i)
      if (p.leq[i][k])
        for (uint32_t j = 0; j < n; ++j)
          if (p.leq[k][j]) p.leq[i][j] = true;
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j)
      if (p.leq[i][j] && p.leq[j][i])
        throw DomainError(DomainError::Kind::BadInput,
                          "order cycle between " + p.conditions[i] + " and " +
                              p.conditions[j]);
  return p;
}

DensityReport is_dense(const Poset& p, const std::vector<uint32_t>& set) {
  DensityReport rep;
  for (uint32_t c : set)
    if (c >= p.size())
      throw DomainError(DomainError::Kind::BadInput,
                        "dense set index out of range");
  for (uint32_t cond = 0; cond < p.size(); ++cond) {
    bool met = false;
    for (uint32_t q : set)
      if (p.leq[q][cond]) {
        met = true;
        break;
      }
    if (!met) {
      rep.dense = false;
      rep.witness = cond;
      return rep;
    }
  }
  return rep;
}

bool GenericFilterResult::ok() const {
  if (!upward_closed || !downward_directed) return false;
  return std::all_of(meets.begin(), meets.end(), [](bool b) { return b; });
}

GenericFilterResult build_generic_filter(
    const Poset& p, const std::vector<std::vector<uint32_t>>& dense_sets) {
  for (std::size_t n = 0; n < dense_sets.size(); ++n) {
    auto rep = is_dense(p, dense_sets[n]);
    if (!rep.dense)
      throw DomainError(DomainError::Kind::NotDense,
                        "set " + std::to_string(n) +
                            " is not dense: no extension of " +
                            p.conditions[*rep.witness]);
  }

  GenericFilterResult out;
  std::optional<uint32_t> start;
  for (uint32_t c = 0; c < p.size() && !start; ++c) {
    bool weakest = true;
    for (uint32_t r = 0; r < p.size(); ++r)
      if (r != c && p.leq[c][r]) {
        weakest = false;
        break;
      }
    if (weakest) start = c;
  }
  // Antisymmetry plus finiteness guarantee a maximal condition.
  out.chain.push_back(*start);

  for (const auto& dense : dense_sets) {
    uint32_t prev = out.chain.back();
    std::optional<uint32_t> next;
    for (uint32_t q : dense)
      if (p.leq[q][prev] && (!next || q < *next)) next = q;
    out.chain.push_back(*next);
  }

  std::set<uint32_t> filter;
  for (uint32_t c : out.chain)
    for (uint32_t up = 0; up < p.size(); ++up)
      if (p.leq[c][up]) filter.insert(up);
  out.filter.assign(filter.begin(), filter.end());

  for (uint32_t f : out.filter)
    for (uint32_t up = 0; up < p.size(); ++up)
      if (p.leq[f][up] && !filter.count(up)) out.upward_closed = false;
  uint32_t strongest = out.chain.back();
  for (uint32_t f : out.filter)
    if (!p.leq[strongest][f]) out.downward_directed = false;
  for (const auto& dense : dense_sets) {
    bool met = false;
    for (uint32_t q : dense)
      if (filter.count(q)) {
        met = true;
        break;
      }
    out.meets.push_back(met);
  }
  return out;
}

PosetSpec poset_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(DomainError::Kind::BadInput,
                      std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("conditions") || !j.contains("leq"))
    throw DomainError(DomainError::Kind::BadInput,
                      "expected an object with \"conditions\" and \"leq\"");
  if (!j["conditions"].is_array())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"conditions\" must be an array of strings");
  std::vector<std::string> conditions;
  for (const auto& c : j["conditions"]) {
    if (!c.is_string())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"conditions\" must be an array of strings");
    conditions.push_back(c.get<std::string>());
  }
  if (!j["leq"].is_array())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"leq\" must be an array of [stronger, weaker] pairs");
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (const auto& e : j["leq"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"leq\" must be an array of [stronger, weaker] pairs");
    pairs.emplace_back(e[0].get<uint32_t>(), e[1].get<uint32_t>());
  }
  PosetSpec spec;
  spec.poset = Poset::from_pairs(std::move(conditions), pairs);
  if (j.contains("dense")) {
    if (!j["dense"].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"dense\" must be an array of index arrays");
    for (const auto& d : j["dense"]) {
      if (!d.is_array())
        throw DomainError(DomainError::Kind::BadInput,
                          "\"dense\" must be an array of index arrays");
      std::vector<uint32_t> set;
      for (const auto& v : d) {
        if (!v.is_number_unsigned() ||
            v.get<uint64_t>() >= spec.poset.size())
          throw DomainError(DomainError::Kind::BadInput,
                            "dense set index out of range");
        set.push_back(v.get<uint32_t>());
      }
      spec.dense_sets.push_back(std::move(set));
    }
  }
  return spec;
}

}  // namespace mvk
