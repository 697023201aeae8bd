#include "mvk/boolean_valued.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "mvk/errors.hpp"
#include "json.hpp"

namespace mvk {

namespace {

using nlohmann::json;

constexpr uint32_t kMaxAtoms = 24;
constexpr uint64_t kMaxNames = 1024;
constexpr uint64_t kMaxRelationRows = 1u << 20;
constexpr std::size_t kMaxWitnesses = 8;

std::size_t tuple_rows(uint64_t size, uint32_t arity) {
  uint64_t rows = 1;
  for (uint32_t i = 0; i < arity; ++i) {
    rows *= size;
    if (rows > kMaxRelationRows)
      throw CapExceeded("relation table too large");
  }
  return static_cast<std::size_t>(rows);
}

void decode_tuple(std::size_t row, uint64_t size, std::vector<uint32_t>& out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<uint32_t>(row % size);
    row /= size;
  }
}

}  // namespace

Ultrafilter Ultrafilter::principal(const FiniteBooleanAlgebra& algebra,
                                   uint32_t atom) {
  if (atom >= algebra.atoms)
    throw DomainError(DomainError::Kind::BadUltrafilter, "atom out of range");
  return Ultrafilter{atom};
}

Ultrafilter Ultrafilter::from_set(const FiniteBooleanAlgebra& algebra,
                                  const std::vector<uint64_t>& members) {
  if (algebra.atoms == 0 || algebra.atoms > kMaxAtoms)
    throw DomainError(DomainError::Kind::BadUltrafilter,
                      "algebra must have between 1 and 24 atoms");
  std::set<uint64_t> set(members.begin(), members.end());
  if (set.empty())
    throw DomainError(DomainError::Kind::BadUltrafilter, "empty set");
  uint64_t meet = algebra.top();
  for (uint64_t m : set) {
    if (!algebra.valid(m))
      throw DomainError(DomainError::Kind::BadUltrafilter,
                        "member outside the algebra");
    meet &= m;
  }
  if (std::popcount(meet) != 1)
    throw DomainError(DomainError::Kind::BadUltrafilter,
                      "meet of members is not an atom");
  uint32_t atom = static_cast<uint32_t>(std::countr_zero(meet));
  uint64_t expected = 1ull << (algebra.atoms - 1);
  if (set.size() != expected)
    throw DomainError(DomainError::Kind::BadUltrafilter,
                      "wrong cardinality for an ultrafilter");
  for (uint64_t m : set)
    if (!((m >> atom) & 1))
      throw DomainError(DomainError::Kind::BadUltrafilter,
                        "member misses the generating atom");
  return Ultrafilter{atom};
}

std::vector<Ultrafilter> all_ultrafilters(const FiniteBooleanAlgebra& algebra) {
  std::vector<Ultrafilter> out;
  for (uint32_t a = 0; a < algebra.atoms; ++a) out.push_back(Ultrafilter{a});
  return out;
}

uint32_t MaximalAntichain::block_of(uint32_t atom) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if ((blocks[i] >> atom) & 1) return static_cast<uint32_t>(i);
  throw DomainError(DomainError::Kind::BadInput, "atom not covered");
}

MaximalAntichain MaximalAntichain::from_blocks(
    const FiniteBooleanAlgebra& algebra, std::vector<uint64_t> blocks) {
  std::sort(blocks.begin(), blocks.end(),
            [](uint64_t a, uint64_t b) {
              return std::countr_zero(a) < std::countr_zero(b);
            });
  uint64_t seen = 0;
  for (uint64_t b : blocks) {
    if (b == 0 || !algebra.valid(b))
      throw DomainError(DomainError::Kind::BadInput,
                        "antichain block empty or outside the algebra");
    if (seen & b)
      throw DomainError(DomainError::Kind::BadInput,
                        "antichain blocks overlap");
    seen |= b;
  }
  if (seen != algebra.top())
    throw DomainError(DomainError::Kind::BadInput,
                      "antichain does not cover the algebra");
  return MaximalAntichain{std::move(blocks)};
}

bool refines(const MaximalAntichain& finer, const MaximalAntichain& coarser) {
  for (uint64_t f : finer.blocks) {
    bool inside = false;
    for (uint64_t c : coarser.blocks)
      if ((f & ~c) == 0) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

std::vector<MaximalAntichain> all_maximal_antichains(
    const FiniteBooleanAlgebra& algebra) {
  if (algebra.atoms == 0 || algebra.atoms > 12)
    throw CapExceeded("antichain enumeration supports 1..12 atoms");
  std::vector<MaximalAntichain> out;
  std::vector<uint32_t> rgs(algebra.atoms, 0);
  // Restricted growth strings in lexicographic order.
  auto emit = [&] {
    uint32_t block_count = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<uint64_t> blocks(block_count, 0);
    for (uint32_t a = 0; a < algebra.atoms; ++a) blocks[rgs[a]] |= 1ull << a;
    out.push_back(MaximalAntichain{std::move(blocks)});
  };
  auto rec = [&](auto&& self, uint32_t i, uint32_t max_used) -> void {
    if (i == algebra.atoms) {
      emit();
      return;
    }
    for (uint32_t v = 0; v <= max_used + 1; ++v) {
      rgs[i] = v;
      self(self, i + 1, std::max(max_used, v));
    }
  };
  rgs[0] = 0;
  rec(rec, 1, 0);
  return out;
}

int BValuedStructure::name_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

uint64_t BValuedStructure::eq_value(uint32_t a, uint32_t b) const {
  return eq[static_cast<std::size_t>(a) * names.size() + b];
}

void BValuedStructure::set_eq(uint32_t a, uint32_t b, uint64_t value) {
  eq[static_cast<std::size_t>(a) * names.size() + b] = value;
  eq[static_cast<std::size_t>(b) * names.size() + a] = value;
}

uint64_t BValuedStructure::rel_value(const std::string& rel,
                                     const std::vector<uint32_t>& args) const {
  auto it = relations.find(rel);
  if (it == relations.end())
    throw DomainError(DomainError::Kind::MissingRelation,
                      "unknown relation: " + rel);
  if (args.size() != it->second.arity)
    throw DomainError(DomainError::Kind::BadInput, "arity mismatch for " + rel);
  std::size_t idx = 0;
  for (uint32_t a : args) {
    if (a >= names.size())
      throw DomainError(DomainError::Kind::BadInput, "name index out of range");
    idx = idx * names.size() + a;
  }
  return it->second.values[idx];
}

void BValuedStructure::set_rel(const std::string& rel,
                               const std::vector<uint32_t>& args,
                               uint64_t value) {
  auto it = relations.find(rel);
  if (it == relations.end())
    throw DomainError(DomainError::Kind::MissingRelation,
                      "unknown relation: " + rel);
  if (args.size() != it->second.arity)
    throw DomainError(DomainError::Kind::BadInput, "arity mismatch for " + rel);
  std::size_t idx = 0;
  for (uint32_t a : args) idx = idx * names.size() + a;
  it->second.values[idx] = value;
}

void BValuedStructure::add_relation(const std::string& rel, uint32_t arity) {
  Relation r;
  r.arity = arity;
  r.values.assign(tuple_rows(names.size(), arity), 0);
  relations.emplace(rel, std::move(r));
}

uint64_t boolean_value(const BValuedStructure& s, const FOFormula& f,
                       const std::map<std::string, uint32_t>& env) {
  using K = FOFormula::Kind;
  auto lookup = [&](const std::string& v) -> uint32_t {
    auto it = env.find(v);
    if (it == env.end())
      throw DomainError(DomainError::Kind::UnknownVariable,
                        "unbound variable: " + v);
    return it->second;
  };
  switch (f.kind()) {
    case K::Eq:
      return s.eq_value(lookup(f.args()[0]), lookup(f.args()[1]));
    case K::Rel: {
      std::vector<uint32_t> args;
      args.reserve(f.args().size());
      for (const auto& v : f.args()) args.push_back(lookup(v));
      return s.rel_value(f.rel_name(), args);
    }
    case K::Not:
      return s.algebra.complement(boolean_value(s, f.child(), env));
    case K::And:
      return boolean_value(s, f.child(0), env) &
             boolean_value(s, f.child(1), env);
    case K::Or:
      return boolean_value(s, f.child(0), env) |
             boolean_value(s, f.child(1), env);
    case K::Imp:
      return s.algebra.complement(boolean_value(s, f.child(0), env)) |
             boolean_value(s, f.child(1), env);
    case K::Exists:
    case K::Forall: {
      bool ex = f.kind() == K::Exists;
      uint64_t acc = ex ? 0 : s.algebra.top();
      auto inner = env;
      for (uint32_t n = 0; n < s.name_count(); ++n) {
        inner[f.bound_var()] = n;
        uint64_t v = boolean_value(s, f.child(), inner);
        acc = ex ? (acc | v) : (acc & v);
      }
      return acc;
    }
  }
  throw Error("unreachable formula kind");
}

EqualityLawReport check_equality_laws(const BValuedStructure& s) {
  EqualityLawReport rep;
  uint32_t n = s.name_count();
  auto note = [&](std::string msg) {
    if (rep.violations.size() < kMaxWitnesses)
      rep.violations.push_back(std::move(msg));
  };
  for (uint32_t i = 0; i < n; ++i)
    if (s.eq_value(i, i) != s.algebra.top()) {
      rep.reflexive = false;
      note("eq(" + s.names[i] + ", " + s.names[i] + ") is not top");
    }
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j)
      if (s.eq_value(i, j) != s.eq_value(j, i)) {
        rep.symmetric = false;
        note("eq(" + s.names[i] + ", " + s.names[j] + ") differs from eq(" +
             s.names[j] + ", " + s.names[i] + ")");
      }
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j)
      for (uint32_t k = 0; k < n; ++k)
        if (!s.algebra.leq(s.eq_value(i, j) & s.eq_value(j, k),
                           s.eq_value(i, k))) {
          rep.transitive = false;
          note("eq(" + s.names[i] + ", " + s.names[j] + ") & eq(" +
               s.names[j] + ", " + s.names[k] + ") exceeds eq(" + s.names[i] +
               ", " + s.names[k] + ")");
        }
  for (const auto& [rel, r] : s.relations) {
    std::size_t rows = r.values.size();
    std::vector<uint32_t> args(r.arity, 0);
    for (std::size_t row = 0; row < rows; ++row) {
      decode_tuple(row, n, args);
      for (uint32_t pos = 0; pos < r.arity; ++pos) {
        auto swapped = args;
        for (uint32_t j = 0; j < n; ++j) {
          swapped[pos] = j;
          if (!s.algebra.leq(s.eq_value(args[pos], j) & s.rel_value(rel, args),
                             s.rel_value(rel, swapped))) {
            rep.substitutive = false;
            note("substituting " + s.names[j] + " for " + s.names[args[pos]] +
                 " in " + rel + " breaks the substitution bound");
          }
        }
      }
    }
  }
  return rep;
}

FullnessReport check_fullness(const BValuedStructure& s,
                              const std::vector<FOFormula>& family) {
  FullnessReport rep;
  for (const auto& f : family) {
    if (f.kind() != FOFormula::Kind::Exists) continue;
    auto free = f.free_variables();
    std::size_t envs = tuple_rows(s.name_count(), static_cast<uint32_t>(free.size()));
    std::vector<uint32_t> pick(free.size(), 0);
    for (std::size_t row = 0; row < envs; ++row) {
      decode_tuple(row, s.name_count(), pick);
      std::map<std::string, uint32_t> env;
      for (std::size_t i = 0; i < free.size(); ++i) env[free[i]] = pick[i];
      uint64_t sup = boolean_value(s, f, env);
      bool attained = false;
      auto inner = env;
      for (uint32_t n = 0; n < s.name_count() && !attained; ++n) {
        inner[f.bound_var()] = n;
        attained = boolean_value(s, f.child(), inner) == sup;
      }
      ++rep.checked;
      if (!attained && rep.full) {
        rep.full = false;
        std::string w = render_fo_formula(f);
        for (std::size_t i = 0; i < free.size(); ++i)
          w += (i ? " " : " with ") + free[i] + "=" + s.names[pick[i]];
        rep.witness = w;
      }
    }
  }
  return rep;
}

QuotientResult quotient_by_ultrafilter(const BValuedStructure& s,
                                       const Ultrafilter& u) {
  auto laws = check_equality_laws(s);
  if (!laws.ok())
    throw DomainError(DomainError::Kind::InvariantViolation,
                      "equality laws fail: " +
                          (laws.violations.empty() ? std::string("unknown")
                                                   : laws.violations.front()));
  uint32_t n = s.name_count();
  QuotientResult out;
  out.class_of.assign(n, 0);
  std::vector<uint32_t> reps;
  for (uint32_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < reps.size() && !placed; ++c)
      if (u.contains(s.eq_value(reps[c], i))) {
        out.class_of[i] = static_cast<uint32_t>(c);
        placed = true;
      }
    if (!placed) {
      out.class_of[i] = static_cast<uint32_t>(reps.size());
      reps.push_back(i);
    }
  }
  out.structure.size = static_cast<uint32_t>(reps.size());
  for (const auto& [rel, r] : s.relations) {
    ClassicalStructure::Relation cr;
    cr.arity = r.arity;
    cr.truth.assign(tuple_rows(out.structure.size, r.arity), false);
    out.structure.relations.emplace(rel, std::move(cr));
    std::vector<uint32_t> classes(r.arity, 0), args(r.arity, 0);
    std::size_t rows = out.structure.relations[rel].truth.size();
    for (std::size_t row = 0; row < rows; ++row) {
      decode_tuple(row, out.structure.size, classes);
      for (uint32_t i = 0; i < r.arity; ++i) args[i] = reps[classes[i]];
      out.structure.relations[rel].truth[row] =
          u.contains(s.rel_value(rel, args));
    }
    // Every representative choice must give the same verdict.
    std::vector<uint32_t> all(r.arity, 0);
    std::size_t name_rows = r.values.size();
    for (std::size_t row = 0; row < name_rows; ++row) {
      decode_tuple(row, n, all);
      for (uint32_t i = 0; i < r.arity; ++i) classes[i] = out.class_of[all[i]];
      if (u.contains(s.rel_value(rel, all)) !=
          out.structure.holds(rel, classes))
        throw DomainError(DomainError::Kind::InvariantViolation,
                          "relation " + rel +
                              " depends on the chosen representatives");
    }
  }
  return out;
}

TransferReport verify_los(const BValuedStructure& s, const Ultrafilter& u,
                          const std::vector<FOFormula>& family) {
  TransferReport rep;
  auto q = quotient_by_ultrafilter(s, u);
  for (const auto& f : family) {
    auto free = f.free_variables();
    std::size_t envs = tuple_rows(s.name_count(), static_cast<uint32_t>(free.size()));
    std::vector<uint32_t> pick(free.size(), 0);
    for (std::size_t row = 0; row < envs; ++row) {
      decode_tuple(row, s.name_count(), pick);
      std::map<std::string, uint32_t> env, env_q;
      for (std::size_t i = 0; i < free.size(); ++i) {
        env[free[i]] = pick[i];
        env_q[free[i]] = q.class_of[pick[i]];
      }
      bool lhs = u.contains(boolean_value(s, f, env));
      bool rhs = classical_eval(q.structure, f, env_q);
      ++rep.checked;
      if (lhs == rhs) {
        ++rep.agreements;
      } else if (rep.mismatches.size() < kMaxWitnesses) {
        std::string w = render_fo_formula(f);
        for (std::size_t i = 0; i < free.size(); ++i)
          w += (i ? " " : " with ") + free[i] + "=" + s.names[pick[i]];
        rep.mismatches.push_back(std::move(w));
      }
    }
  }
  return rep;
}

BValuedStructure full_name_structure(const ClassicalStructure& base,
                                     uint32_t atom_count,
                                     const Limits& limits) {
  if (base.size == 0)
    throw DomainError(DomainError::Kind::BadInput, "base must be nonempty");
  if (atom_count == 0 || atom_count > kMaxAtoms)
    throw DomainError(DomainError::Kind::BadInput,
                      "atom count must be between 1 and 24");
  uint64_t count = 1;
  for (uint32_t a = 0; a < atom_count; ++a) {
    count *= base.size;
    if (count > kMaxNames || count > limits.max_states)
      throw CapExceeded("too many names for the full name structure");
  }

  BValuedStructure s;
  s.algebra.atoms = atom_count;
  const char* sep = base.size > 10 ? "_" : "";
  std::vector<uint32_t> tuple(atom_count, 0);
  for (uint64_t i = 0; i < count; ++i) {
    decode_tuple(i, base.size, tuple);
    std::string name = "f";
    for (uint32_t a = 0; a < atom_count; ++a)
      name += sep + std::to_string(tuple[a]);
    s.names.push_back(std::move(name));
  }

  auto value_at = [&](uint64_t name, uint32_t atom) -> uint32_t {
    for (uint32_t a = atom_count; a-- > atom + 1;) name /= base.size;
    return static_cast<uint32_t>(name % base.size);
  };

  s.eq.assign(static_cast<std::size_t>(count) * count, 0);
  for (uint64_t i = 0; i < count; ++i)
    for (uint64_t j = 0; j < count; ++j) {
      uint64_t mask = 0;
      for (uint32_t a = 0; a < atom_count; ++a)
        if (value_at(i, a) == value_at(j, a)) mask |= 1ull << a;
      s.eq[static_cast<std::size_t>(i) * count + j] = mask;
    }

  for (const auto& [rel, r] : base.relations) {
    s.add_relation(rel, r.arity);
    auto& target = s.relations[rel];
    std::vector<uint32_t> args(r.arity, 0), pointwise(r.arity, 0);
    for (std::size_t row = 0; row < target.values.size(); ++row) {
      decode_tuple(row, count, args);
      uint64_t mask = 0;
      for (uint32_t a = 0; a < atom_count; ++a) {
        for (uint32_t i = 0; i < r.arity; ++i)
          pointwise[i] = value_at(args[i], a);
        if (base.holds(rel, pointwise)) mask |= 1ull << a;
      }
      target.values[row] = mask;
    }
  }
  return s;
}

namespace {

// Names constant on every block of the antichain, restricted into a
// standalone structure; keeps the original indices alongside.
struct Reduced {
  BValuedStructure s;
  std::vector<uint32_t> origin;  // reduced index -> full index
};

Reduced restrict_to_antichain(const BValuedStructure& full,
                              const MaximalAntichain& antichain,
                              const std::vector<std::vector<uint32_t>>& tuples) {
  Reduced out;
  out.s.algebra = full.algebra;
  for (uint32_t i = 0; i < full.name_count(); ++i) {
    bool constant = true;
    for (uint64_t block : antichain.blocks) {
      std::optional<uint32_t> v;
      for (uint32_t a = 0; a < full.algebra.atoms && constant; ++a) {
        if (!((block >> a) & 1)) continue;
        if (!v)
          v = tuples[i][a];
        else if (*v != tuples[i][a])
          constant = false;
      }
      if (!constant) break;
    }
    if (constant) {
      out.origin.push_back(i);
      out.s.names.push_back(full.names[i]);
    }
  }
  uint32_t m = static_cast<uint32_t>(out.origin.size());
  out.s.eq.assign(static_cast<std::size_t>(m) * m, 0);
  for (uint32_t i = 0; i < m; ++i)
    for (uint32_t j = 0; j < m; ++j)
      out.s.eq[static_cast<std::size_t>(i) * m + j] =
          full.eq_value(out.origin[i], out.origin[j]);
  for (const auto& [rel, r] : full.relations) {
    out.s.add_relation(rel, r.arity);
    auto& target = out.s.relations[rel];
    std::vector<uint32_t> reduced(r.arity, 0), args(r.arity, 0);
    for (std::size_t row = 0; row < target.values.size(); ++row) {
      decode_tuple(row, m, reduced);
      for (uint32_t i = 0; i < r.arity; ++i) args[i] = out.origin[reduced[i]];
      target.values[row] = full.rel_value(rel, args);
    }
  }
  return out;
}

}  // namespace

UltrapowerResult boolean_ultrapower(const ClassicalStructure& base,
                                    uint32_t atom_count, const Ultrafilter& u,
                                    UltrapowerMode mode,
                                    const std::vector<MaximalAntichain>* family,
                                    const Limits& limits) {
  if (u.atom >= atom_count)
    throw DomainError(DomainError::Kind::BadUltrafilter, "atom out of range");
  BValuedStructure full = full_name_structure(base, atom_count, limits);
  UltrapowerResult out;
  out.name_count = full.name_count();

  if (mode == UltrapowerMode::Quotient) {
    auto q = quotient_by_ultrafilter(full, u);
    out.structure = std::move(q.structure);
    out.iso_to_base = find_isomorphism(out.structure, base);
    return out;
  }

  std::vector<MaximalAntichain> owned;
  if (!family) {
    owned = all_maximal_antichains(full.algebra);
    family = &owned;
  }
  if (family->empty())
    throw DomainError(DomainError::Kind::NotRefinementDirected,
                      "empty antichain family");
  out.antichains = static_cast<uint32_t>(family->size());

  for (std::size_t i = 0; i < family->size(); ++i)
    for (std::size_t j = 0; j < family->size(); ++j) {
      bool directed = false;
      for (const auto& c : *family)
        if (refines(c, (*family)[i]) && refines(c, (*family)[j])) {
          directed = true;
          break;
        }
      if (!directed)
        throw DomainError(DomainError::Kind::NotRefinementDirected,
                          "no common refinement inside the family");
    }
  std::optional<std::size_t> finest;
  for (std::size_t i = 0; i < family->size() && !finest; ++i) {
    bool max = true;
    for (const auto& other : *family)
      if (!refines((*family)[i], other)) {
        max = false;
        break;
      }
    if (max) finest = i;
  }
  if (!finest)
    throw DomainError(DomainError::Kind::NotRefinementDirected,
                      "family has no finest antichain");

  std::vector<std::vector<uint32_t>> tuples(full.name_count());
  for (uint32_t i = 0; i < full.name_count(); ++i) {
    tuples[i].assign(full.algebra.atoms, 0);
    uint64_t rest = i;
    for (uint32_t a = full.algebra.atoms; a-- > 0;) {
      tuples[i][a] = static_cast<uint32_t>(rest % base.size);
      rest /= base.size;
    }
  }

  std::vector<Reduced> reduced;
  std::vector<QuotientResult> quotients;
  for (const auto& a : *family) {
    reduced.push_back(restrict_to_antichain(full, a, tuples));
    quotients.push_back(quotient_by_ultrafilter(reduced.back().s, u));
  }

  // class_in_full[k][i]: the class the full name i lands in at family
  // member k, when i survives the restriction.
  std::vector<std::map<uint32_t, uint32_t>> class_in_full(family->size());
  for (std::size_t k = 0; k < family->size(); ++k)
    for (uint32_t r = 0; r < reduced[k].origin.size(); ++r)
      class_in_full[k][reduced[k].origin[r]] = quotients[k].class_of[r];

  auto embedding = [&](std::size_t from,
                       std::size_t to) -> std::optional<std::vector<uint32_t>> {
    std::vector<std::optional<uint32_t>> map(quotients[from].structure.size);
    for (const auto& [name, cls] : class_in_full[from]) {
      auto it = class_in_full[to].find(name);
      if (it == class_in_full[to].end()) return std::nullopt;
      if (map[cls] && *map[cls] != it->second) return std::nullopt;
      map[cls] = it->second;
    }
    std::vector<uint32_t> flat;
    std::set<uint32_t> image;
    for (auto& m : map) {
      if (!m) return std::nullopt;
      if (!image.insert(*m).second) return std::nullopt;  // not injective
      flat.push_back(*m);
    }
    for (const auto& [rel, r] :
         quotients[from].structure.relations) {
      std::vector<uint32_t> args(r.arity, 0), mapped(r.arity, 0);
      for (std::size_t row = 0; row < r.truth.size(); ++row) {
        decode_tuple(row, quotients[from].structure.size, args);
        for (uint32_t i = 0; i < r.arity; ++i) mapped[i] = flat[args[i]];
        if (quotients[from].structure.holds(rel, args) !=
            quotients[to].structure.holds(rel, mapped))
          return std::nullopt;
      }
    }
    return flat;
  };

  std::vector<std::vector<std::optional<std::vector<uint32_t>>>> maps(
      family->size(),
      std::vector<std::optional<std::vector<uint32_t>>>(family->size()));
  for (std::size_t i = 0; i < family->size(); ++i)
    for (std::size_t j = 0; j < family->size(); ++j) {
      if (!refines((*family)[j], (*family)[i])) continue;
      maps[i][j] = embedding(i, j);
      if (!maps[i][j]) out.embeddings_commute = false;
    }
  for (std::size_t i = 0; i < family->size(); ++i)
    for (std::size_t j = 0; j < family->size(); ++j) {
      if (!maps[i][j]) continue;
      for (std::size_t k = 0; k < family->size(); ++k) {
        if (!maps[j][k] || !maps[i][k]) continue;
        for (std::size_t e = 0; e < maps[i][j]->size(); ++e)
          if ((*maps[i][k])[e] != (*maps[j][k])[(*maps[i][j])[e]])
            out.embeddings_commute = false;
      }
    }

  out.structure = quotients[*finest].structure;
  out.iso_to_base = find_isomorphism(out.structure, base);
  return out;
}

namespace {

uint64_t mask_from_atoms(const json& arr, uint32_t atoms, const char* what) {
  if (!arr.is_array())
    throw DomainError(DomainError::Kind::BadInput,
                      std::string(what) + " must be an array of atom indices");
  uint64_t mask = 0;
  for (const auto& v : arr) {
    if (!v.is_number_unsigned() || v.get<uint64_t>() >= atoms)
      throw DomainError(DomainError::Kind::BadInput,
                        std::string(what) + " has an atom index out of range");
    mask |= 1ull << v.get<uint64_t>();
  }
  return mask;
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = key.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(key.substr(start));
      return parts;
    }
    parts.push_back(key.substr(start, comma - start));
    start = comma + 1;
  }
}

json atoms_of_mask(uint64_t mask) {
  json arr = json::array();
  for (uint32_t a = 0; a < 64; ++a)
    if ((mask >> a) & 1) arr.push_back(a);
  return arr;
}

}  // namespace

BValuedStructure bvalued_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(DomainError::Kind::BadInput,
                      std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("atoms") || !j.contains("names"))
    throw DomainError(DomainError::Kind::BadInput,
                      "expected an object with \"atoms\" and \"names\"");
  BValuedStructure s;
  if (!j["atoms"].is_number_unsigned() || j["atoms"].get<uint64_t>() == 0 ||
      j["atoms"].get<uint64_t>() > kMaxAtoms)
    throw DomainError(DomainError::Kind::BadInput,
                      "\"atoms\" must be between 1 and 24");
  s.algebra.atoms = j["atoms"].get<uint32_t>();
  if (!j["names"].is_array() || j["names"].empty())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"names\" must be a nonempty array");
  std::set<std::string> seen;
  for (const auto& n : j["names"]) {
    if (!n.is_string() || n.get<std::string>().empty() ||
        n.get<std::string>().find(',') != std::string::npos)
      throw DomainError(DomainError::Kind::BadInput,
                        "names must be nonempty strings without commas");
    if (!seen.insert(n.get<std::string>()).second)
      throw DomainError(DomainError::Kind::BadInput,
                        "duplicate name: " + n.get<std::string>());
    s.names.push_back(n.get<std::string>());
  }
  uint32_t n = s.name_count();
  if (n > kMaxNames) throw CapExceeded("too many names");
  s.eq.assign(static_cast<std::size_t>(n) * n, 0);
  for (uint32_t i = 0; i < n; ++i) s.set_eq(i, i, s.algebra.top());

  auto resolve = [&](const std::string& name) -> uint32_t {
    int idx = s.name_index(name);
    if (idx < 0)
      throw DomainError(DomainError::Kind::BadInput, "unknown name: " + name);
    return static_cast<uint32_t>(idx);
  };

  if (j.contains("eq")) {
    if (!j["eq"].is_object())
      throw DomainError(DomainError::Kind::BadInput, "\"eq\" must be an object");
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> given;
    for (const auto& [key, value] : j["eq"].items()) {
      auto parts = split_key(key);
      if (parts.size() != 2)
        throw DomainError(DomainError::Kind::BadInput,
                          "eq keys must be \"name,name\": " + key);
      uint32_t a = resolve(parts[0]), b = resolve(parts[1]);
      uint64_t mask = mask_from_atoms(value, s.algebra.atoms, "eq entry");
      auto ordered = std::minmax(a, b);
      auto [it, fresh] = given.emplace(ordered, mask);
      if (!fresh && it->second != mask)
        throw DomainError(DomainError::Kind::BadInput,
                          "conflicting eq entries for " + key);
      s.set_eq(a, b, mask);
    }
  }

  if (j.contains("relations")) {
    if (!j["relations"].is_object())
      throw DomainError(DomainError::Kind::BadInput,
                        "\"relations\" must be an object");
    for (const auto& [rel, body] : j["relations"].items()) {
      if (!body.is_object() || !body.contains("arity") ||
          !body["arity"].is_number_unsigned())
        throw DomainError(DomainError::Kind::BadInput,
                          "relation " + rel + " needs an unsigned \"arity\"");
      uint32_t arity = body["arity"].get<uint32_t>();
      s.add_relation(rel, arity);
      if (!body.contains("values")) continue;
      if (!body["values"].is_object())
        throw DomainError(DomainError::Kind::BadInput,
                          "relation " + rel + " \"values\" must be an object");
      for (const auto& [key, value] : body["values"].items()) {
        auto parts = split_key(key);
        if (parts.size() != arity)
          throw DomainError(DomainError::Kind::BadInput,
                            "relation " + rel + " key has wrong arity: " + key);
        std::vector<uint32_t> args;
        for (const auto& p : parts) args.push_back(resolve(p));
        s.set_rel(rel, args,
                  mask_from_atoms(value, s.algebra.atoms, "relation entry"));
      }
    }
  }
  return s;
}

std::string bvalued_to_json(const BValuedStructure& s, bool pretty) {
  json j;
  j["atoms"] = s.algebra.atoms;
  j["names"] = s.names;
  json eq = json::object();
  uint32_t n = s.name_count();
  for (uint32_t i = 0; i < n; ++i) {
    if (s.eq_value(i, i) != s.algebra.top())
      eq[s.names[i] + "," + s.names[i]] = atoms_of_mask(s.eq_value(i, i));
    for (uint32_t k = i + 1; k < n; ++k)
      if (s.eq_value(i, k) != 0)
        eq[s.names[i] + "," + s.names[k]] = atoms_of_mask(s.eq_value(i, k));
  }
  j["eq"] = std::move(eq);
  json rels = json::object();
  for (const auto& [rel, r] : s.relations) {
    json body;
    body["arity"] = r.arity;
    json values = json::object();
    std::vector<uint32_t> args(r.arity, 0);
    for (std::size_t row = 0; row < r.values.size(); ++row) {
      if (r.values[row] == 0) continue;
      decode_tuple(row, n, args);
      std::string key;
      for (uint32_t i = 0; i < r.arity; ++i) {
        if (i) key += ',';
        key += s.names[args[i]];
      }
      values[key] = atoms_of_mask(r.values[row]);
    }
    body["values"] = std::move(values);
    rels[rel] = std::move(body);
  }
  j["relations"] = std::move(rels);
  return pretty ? j.dump(2) : j.dump();
}

}  // namespace mvk
