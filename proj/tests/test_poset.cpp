#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mvk/errors.hpp"
#include "mvk/poset.hpp"

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

TEST_CASE("from_pairs closes and validates the order") {
  // c <= b <= a given as direct pairs only; transitivity is closed.
  Poset p = Poset::from_pairs({"a", "b", "c"}, {{1, 0}, {2, 1}});
  CHECK(p.leq[2][0]);
  CHECK(p.leq[0][0]);
  CHECK(!p.leq[0][2]);

  CHECK_THROWS_AS(Poset::from_pairs({}, {}), DomainError);
  CHECK_THROWS_AS(Poset::from_pairs({"a", "a"}, {}), DomainError);
  CHECK_THROWS_AS(Poset::from_pairs({"a"}, {{0, 3}}), DomainError);

  try {
    Poset::from_pairs({"a", "b"}, {{0, 1}, {1, 0}});
    FAIL("cycle accepted");
  } catch (const DomainError& e) {
    CHECK(e.kind == DomainError::Kind::BadInput);
    CHECK(std::string(e.what()).find("order cycle") != std::string::npos);
  }
}

TEST_CASE("density reports the stuck condition") {
  PosetSpec spec = poset_from_json(fixture("poset_tree3.json"));
  const Poset& p = spec.poset;
  REQUIRE(p.size() == 15);

  for (const auto& d : spec.dense_sets) CHECK(is_dense(p, d).dense);

  // Level sets are not dense: a deeper node has no extension that high.
  DensityReport level1 = is_dense(p, {1, 2});
  CHECK(!level1.dense);
  REQUIRE(level1.witness.has_value());
  CHECK(*level1.witness == 3);  // "00" is the least stuck condition

  DensityReport leaves = is_dense(p, {7, 8, 9, 10, 11, 12, 13, 14});
  CHECK(leaves.dense);
}

TEST_CASE("generic filter on the binary tree") {
  PosetSpec spec = poset_from_json(fixture("poset_tree3.json"));
  GenericFilterResult r = build_generic_filter(spec.poset, spec.dense_sets);

  // Deterministic leftmost branch.
  CHECK(r.chain == std::vector<uint32_t>{0, 1, 3, 7});
  CHECK(r.filter == std::vector<uint32_t>{0, 1, 3, 7});
  CHECK(r.ok());
  CHECK(r.upward_closed);
  CHECK(r.downward_directed);
  REQUIRE(r.meets.size() == 3);
  for (bool met : r.meets) CHECK(met);

  // Filter members form a chain: any two are comparable.
  for (uint32_t a : r.filter)
    for (uint32_t b : r.filter)
      CHECK((spec.poset.leq[a][b] || spec.poset.leq[b][a]));

  // Genericity: the filter meets each dense set.
  for (const auto& d : spec.dense_sets) {
    bool met = false;
    for (uint32_t q : d)
      for (uint32_t f : r.filter)
        if (q == f) met = true;
    CHECK(met);
  }
}

TEST_CASE("generic filter without dense sets is principal at the weakest") {
  Poset p = Poset::from_pairs({"a", "b", "c"}, {{1, 0}, {2, 0}});
  GenericFilterResult r = build_generic_filter(p, {});
  CHECK(r.chain == std::vector<uint32_t>{0});
  CHECK(r.filter == std::vector<uint32_t>{0});
  CHECK(r.ok());
}

TEST_CASE("non-dense sets are rejected with the stuck condition") {
  PosetSpec spec = poset_from_json(fixture("poset_nodense.json"));
  try {
    build_generic_filter(spec.poset, spec.dense_sets);
    FAIL("accepted a non-dense set");
  } catch (const DomainError& e) {
    CHECK(e.kind == DomainError::Kind::NotDense);
    CHECK(std::string(e.what()).find("not dense") != std::string::npos);
    CHECK(std::string(e.what()).find("a") != std::string::npos);
  }
}

TEST_CASE("poset json codec validation") {
  CHECK_THROWS_AS(poset_from_json("null"), DomainError);
  CHECK_THROWS_AS(poset_from_json(R"({"conditions": []})"), DomainError);
  CHECK_THROWS_AS(poset_from_json(R"({"conditions": ["a"], "leq": [[0]]})"),
                  DomainError);
  CHECK_THROWS_AS(
      poset_from_json(R"({"conditions": ["a"], "leq": [], "dense": [[9]]})"),
      DomainError);
  CHECK_THROWS_AS(poset_from_json(fixture("poset_cycle.json")), DomainError);

  PosetSpec ok = poset_from_json(R"({"conditions": ["a", "b"],
                                     "leq": [[1, 0]]})");
  CHECK(ok.poset.size() == 2);
  CHECK(ok.dense_sets.empty());
}
