#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mvk/boolean_valued.hpp"
#include "mvk/errors.hpp"

using namespace mvk;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/fixtures/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("algebra mask arithmetic") {
  FiniteBooleanAlgebra b{3};
  CHECK(b.top() == 0b111);
  CHECK(b.complement(0b101) == 0b010);
  CHECK(b.leq(0b001, 0b011));
  CHECK(!b.leq(0b100, 0b011));
  CHECK(b.valid(0b111));
  CHECK(!b.valid(0b1000));
}

TEST_CASE("ultrafilters on a finite algebra are principal") {
  FiniteBooleanAlgebra b{3};
  auto us = all_ultrafilters(b);
  REQUIRE(us.size() == 3);
  for (uint32_t a = 0; a < 3; ++a) {
    CHECK(us[a].atom == a);
    CHECK(us[a].contains(1ull << a));
    CHECK(!us[a].contains(b.complement(1ull << a)));
    CHECK(us[a].contains(b.top()));
    CHECK(!us[a].contains(0));
  }

  // from_set accepts exactly the principal filter at an atom.
  std::vector<uint64_t> at0;
  for (uint64_t m = 0; m <= b.top(); ++m)
    if (m & 1) at0.push_back(m);
  Ultrafilter u = Ultrafilter::from_set(b, at0);
  CHECK(u.atom == 0);

  SUBCASE("rejects a filter missing members") {
    at0.pop_back();
    CHECK_THROWS_AS(Ultrafilter::from_set(b, at0), DomainError);
  }
  SUBCASE("rejects a non-filter containing bottom") {
    at0.push_back(0);
    CHECK_THROWS_AS(Ultrafilter::from_set(b, at0), DomainError);
  }
  SUBCASE("rejects a set whose meet is not an atom") {
    // Upward closure of {0,1}: not maximal.
    std::vector<uint64_t> coarse;
    for (uint64_t m = 0; m <= b.top(); ++m)
      if ((m & 0b011) == 0b011) coarse.push_back(m);
    CHECK_THROWS_AS(Ultrafilter::from_set(b, coarse), DomainError);
  }
}

TEST_CASE("maximal antichains enumerate the atom partitions") {
  FiniteBooleanAlgebra b3{3};
  auto chains = all_maximal_antichains(b3);
  CHECK(chains.size() == 5);  // Bell(3)

  // First in restricted-growth order: everything in one block.
  CHECK(chains.front().blocks == std::vector<uint64_t>{0b111});
  // Last: all singletons.
  CHECK(chains.back().blocks == std::vector<uint64_t>{0b001, 0b010, 0b100});

  for (const auto& mac : chains) {
    uint64_t join = 0;
    for (uint64_t blk : mac.blocks) {
      CHECK((join & blk) == 0);
      join |= blk;
    }
    CHECK(join == b3.top());
  }

  FiniteBooleanAlgebra b4{4};
  CHECK(all_maximal_antichains(b4).size() == 15);  // Bell(4)

  MaximalAntichain pairs = MaximalAntichain::from_blocks(b3, {0b011, 0b100});
  CHECK(pairs.block_of(0) == 0);
  CHECK(pairs.block_of(1) == 0);
  CHECK(pairs.block_of(2) == 1);
  CHECK_THROWS_AS(MaximalAntichain::from_blocks(b3, {0b011, 0b110}),
                  DomainError);
  CHECK_THROWS_AS(MaximalAntichain::from_blocks(b3, {0b011}), DomainError);

  // Refinement: singletons refine everything, nothing proper refines them.
  CHECK(refines(chains.back(), chains.front()));
  CHECK(refines(chains.back(), pairs));
  CHECK(!refines(pairs, chains.back()));
  CHECK(refines(pairs, pairs));
}

TEST_CASE("boolean values agree with hand computations") {
  BValuedStructure s = bvalued_from_json(fixture("bval_small.json"));
  REQUIRE(s.name_count() == 2);
  CHECK(s.eq_value(0, 0) == 0b11);
  CHECK(s.eq_value(0, 1) == 0b01);
  CHECK(s.eq_value(1, 0) == 0b01);

  std::map<std::string, uint32_t> env{{"a", 0}, {"b", 1}};
  auto val = [&](const char* f) {
    return boolean_value(s, parse_fo_formula(f), env);
  };

  CHECK(val("a = b") == 0b01);
  CHECK(val("~(a = b)") == 0b10);
  CHECK(val("a = b | ~(a = b)") == 0b11);
  // sup over x of [x=a & x=b]: x=a gives 11&01, x=b gives 01&11.
  CHECK(val("exists x. (x = a & x = b)") == 0b01);
  // inf over x of [x=a]: 11 & 01.
  CHECK(val("forall x. x = a") == 0b01);
  // Implication is material: comp(01) | 01.
  CHECK(val("a = b -> b = a") == 0b11);

  CHECK_THROWS_AS(boolean_value(s, parse_fo_formula("z = a"), {}),
                  DomainError);
}

TEST_CASE("boolean values on relations") {
  BValuedStructure s = bvalued_from_json(fixture("bval_rel.json"));
  std::map<std::string, uint32_t> env{{"a", 0}, {"b", 1}, {"c", 2}};
  auto val = [&](const char* f) {
    return boolean_value(s, parse_fo_formula(f), env);
  };
  CHECK(val("R(a, a)") == 0b111);
  CHECK(val("R(a, b)") == 0b101);
  CHECK(val("R(b, c)") == 0b010);
  CHECK(val("R(c, a)") == 0);
  // sup over y of R(a, y): 111 | 101 | 0.
  CHECK(val("exists y. R(a, y)") == 0b111);
  // inf over y of R(y, c): 0 & 010 & 0.
  CHECK(val("forall y. R(y, c)") == 0);

  CHECK_THROWS_AS(boolean_value(s, parse_fo_formula("Q(a)"), env),
                  DomainError);
}

TEST_CASE("equality law checks") {
  EqualityLawReport good =
      check_equality_laws(bvalued_from_json(fixture("bval_small.json")));
  CHECK(good.ok());
  CHECK(good.violations.empty());

  EqualityLawReport merged =
      check_equality_laws(bvalued_from_json(fixture("bval_merge.json")));
  CHECK(merged.ok());

  // eq(f0,f1) = eq(f1,f2) = {0} but eq(f0,f2) = bottom.
  EqualityLawReport bad =
      check_equality_laws(bvalued_from_json(fixture("bval_badlaws.json")));
  CHECK(!bad.ok());
  CHECK(!bad.transitive);
  CHECK(bad.reflexive);
  CHECK(bad.symmetric);
  REQUIRE(!bad.violations.empty());
  CHECK(bad.violations.front() ==
        "eq(f0, f1) & eq(f1, f2) exceeds eq(f0, f2)");

  // A substitution failure: equal names with different relation values.
  BValuedStructure sub = bvalued_from_json(fixture("bval_merge.json"));
  sub.set_rel("R", {1}, 0);  // now R(f0)={0,1} but eq(f0,f1)={1}
  EqualityLawReport subbad = check_equality_laws(sub);
  CHECK(!subbad.substitutive);
}

TEST_CASE("fullness detection") {
  auto family = generate_fo_family({{"P", 1}}, 3, 1);

  // P(f0)={0}, P(f1)={1}: exists x. P(x) evaluates to top yet neither
  // name attains it.
  FullnessReport nf = check_fullness(
      bvalued_from_json(fixture("bval_notfull.json")), family);
  CHECK(!nf.full);
  CHECK(nf.witness == "exists x. P(x)");

  // With names covering every P-pattern each existential sup is attained:
  // exists x. P(x) needs the top pattern, exists x. ~P(x) the bottom one.
  BValuedStructure fixed;
  fixed.algebra = FiniteBooleanAlgebra{2};
  fixed.names = {"f0", "f1", "g", "h"};
  fixed.eq.assign(16, 0);
  for (uint32_t i = 0; i < 4; ++i) fixed.set_eq(i, i, fixed.algebra.top());
  fixed.add_relation("P", 1);
  fixed.set_rel("P", {0}, 0b01);
  fixed.set_rel("P", {1}, 0b10);
  fixed.set_rel("P", {2}, 0b11);
  fixed.set_rel("P", {3}, 0);
  REQUIRE(check_equality_laws(fixed).ok());
  FullnessReport rf = check_fullness(fixed, family);
  CHECK(rf.full);
  CHECK(rf.checked > 0);
}

TEST_CASE("quotient by a principal ultrafilter") {
  BValuedStructure s = bvalued_from_json(fixture("bval_merge.json"));
  FiniteBooleanAlgebra b = s.algebra;

  SUBCASE("names merge where the ultrafilter believes them equal") {
    QuotientResult q = quotient_by_ultrafilter(s, Ultrafilter::principal(b, 1));
    CHECK(q.structure.size == 1);
    CHECK(q.class_of == std::vector<uint32_t>{0, 0});
    CHECK(q.structure.holds("R", {0}));
  }
  SUBCASE("names split where it does not") {
    QuotientResult q = quotient_by_ultrafilter(s, Ultrafilter::principal(b, 0));
    CHECK(q.structure.size == 2);
    CHECK(q.class_of == std::vector<uint32_t>{0, 1});
    CHECK(q.structure.holds("R", {0}));
    CHECK(!q.structure.holds("R", {1}));
  }
  SUBCASE("law violations are rejected") {
    BValuedStructure bad = bvalued_from_json(fixture("bval_badlaws.json"));
    CHECK_THROWS_AS(
        quotient_by_ultrafilter(bad, Ultrafilter::principal(bad.algebra, 0)),
        DomainError);
  }
}

TEST_CASE("transfer is exact for principal ultrafilters") {
  auto family = generate_fo_family({{"R", 2}}, 3, 1);
  BValuedStructure s = bvalued_from_json(fixture("bval_rel.json"));
  for (const Ultrafilter& u : all_ultrafilters(s.algebra)) {
    TransferReport rep = verify_los(s, u, family);
    CHECK(rep.exact());
    CHECK(rep.checked > 0);
    CHECK(rep.mismatches.empty());
  }
}

TEST_CASE("full name structure lists every function to the base") {
  ClassicalStructure base = classical_from_json(fixture("classical_base2.json"));
  BValuedStructure s = full_name_structure(base, 2);
  CHECK(s.algebra.atoms == 2);
  REQUIRE(s.name_count() == 4);  // 2^2 functions

  // Names are f0..f3, digit i encoding the value at atom i.
  CHECK(s.names == std::vector<std::string>{"f00", "f01", "f10", "f11"});

  // Coordinatewise equality: f01 equals f00 at atom 0 only.
  CHECK(s.eq_value(s.name_index("f00"), s.name_index("f01")) == 0b01);
  CHECK(s.eq_value(s.name_index("f01"), s.name_index("f10")) == 0);
  // R holds at atom a when the coordinates are R-related in the base.
  CHECK(s.rel_value("R", {static_cast<uint32_t>(s.name_index("f00")),
                          static_cast<uint32_t>(s.name_index("f11"))}) ==
        0b11);
  // R(f01, f10) holds at atom 0 only: there the coordinates are (0, 1).
  CHECK(s.rel_value("R", {static_cast<uint32_t>(s.name_index("f01")),
                          static_cast<uint32_t>(s.name_index("f10"))}) ==
        0b01);
  CHECK(s.rel_value("R", {static_cast<uint32_t>(s.name_index("f10")),
                          static_cast<uint32_t>(s.name_index("f01"))}) ==
        0b10);
  CHECK(check_equality_laws(s).ok());

  Limits tight;
  tight.max_states = 3;
  CHECK_THROWS_AS(full_name_structure(base, 2, tight), CapExceeded);
}

TEST_CASE("ultrapower along a principal ultrafilter reproduces the base") {
  ClassicalStructure base = classical_from_json(fixture("classical_base3.json"));
  FiniteBooleanAlgebra b{2};

  for (uint32_t atom = 0; atom < 2; ++atom) {
    Ultrafilter u = Ultrafilter::principal(b, atom);

    UltrapowerResult quot =
        boolean_ultrapower(base, 2, u, UltrapowerMode::Quotient);
    CHECK(quot.name_count == 9);  // 3^2 functions
    CHECK(quot.structure.size == 3);
    REQUIRE(quot.iso_to_base.has_value());

    UltrapowerResult lim =
        boolean_ultrapower(base, 2, u, UltrapowerMode::AntichainLimit);
    CHECK(lim.antichains == 2);  // Bell(2)
    CHECK(lim.embeddings_commute);
    REQUIRE(lim.iso_to_base.has_value());

    // Both modes agree up to isomorphism.
    CHECK(find_isomorphism(quot.structure, lim.structure).has_value());
  }
}

TEST_CASE("antichain family validation") {
  ClassicalStructure base = classical_from_json(fixture("classical_base2.json"));
  FiniteBooleanAlgebra b{3};
  Ultrafilter u = Ultrafilter::principal(b, 0);

  // {{01|10 family}, {001,110}} with no common refinement inside the family.
  std::vector<MaximalAntichain> family{
      MaximalAntichain::from_blocks(b, {0b011, 0b100}),
      MaximalAntichain::from_blocks(b, {0b001, 0b110}),
  };
  CHECK_THROWS_AS(boolean_ultrapower(base, 3, u, UltrapowerMode::AntichainLimit,
                                     &family),
                  DomainError);

  // Adding the singleton partition gives a finest member and succeeds.
  family.push_back(MaximalAntichain::from_blocks(b, {0b001, 0b010, 0b100}));
  UltrapowerResult r = boolean_ultrapower(
      base, 3, u, UltrapowerMode::AntichainLimit, &family);
  CHECK(r.antichains == 3);
  CHECK(r.embeddings_commute);
  REQUIRE(r.iso_to_base.has_value());
}

TEST_CASE("bvalued json codec round-trips") {
  BValuedStructure s = bvalued_from_json(fixture("bval_rel.json"));
  BValuedStructure back = bvalued_from_json(bvalued_to_json(s));
  CHECK(back.names == s.names);
  CHECK(back.eq == s.eq);
  REQUIRE(back.relations.count("R") == 1);
  CHECK(back.relations.at("R").values == s.relations.at("R").values);

  CHECK_THROWS_AS(bvalued_from_json("[]"), DomainError);
  CHECK_THROWS_AS(bvalued_from_json(R"({"atoms": 0, "names": ["f"]})"),
                  DomainError);
  CHECK_THROWS_AS(
      bvalued_from_json(R"({"atoms": 2, "names": ["f", "f"]})"),
      DomainError);
  // Conflicting eq entries for the two orders of one pair.
  CHECK_THROWS_AS(bvalued_from_json(R"({"atoms": 2, "names": ["a", "b"],
      "eq": {"a,b": [0], "b,a": [1]}})"),
                  DomainError);
  // Unknown name in a value key.
  CHECK_THROWS_AS(bvalued_from_json(R"({"atoms": 2, "names": ["a"],
      "relations": {"R": {"arity": 1, "values": {"z": [0]}}}})"),
                  DomainError);
}
