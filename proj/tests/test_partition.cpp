#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "atompart/partition.hpp"
#include "oracle_helpers.hpp"

using namespace atompart;

namespace {
Partition P(int n, std::vector<std::vector<int>> blocks) {
  return Partition::from_blocks(n, std::move(blocks));
}
}  // namespace

TEST_CASE("canonical form: blocks sorted internally and by least element") {
  auto p = P(5, {{4, 2}, {5, 1, 3}});
  REQUIRE(p.blocks().size() == 2);
  CHECK(p.blocks()[0] == std::vector<int>{1, 3, 5});
  CHECK(p.blocks()[1] == std::vector<int>{2, 4});
  CHECK(p == P(5, {{3, 5, 1}, {2, 4}}));
  CHECK(p.block_sizes().sizes == std::vector<int>{3, 2});
  CHECK(p.assignments() == std::vector<int>{0, 1, 0, 1, 0});
}

TEST_CASE("from_blocks rejects malformed input") {
  CHECK_THROWS_AS(P(3, {{1, 2}}), InvalidArgument);          // 3 missing
  CHECK_THROWS_AS(P(2, {{1}, {1, 2}}), InvalidArgument);     // 1 repeated
  CHECK_THROWS_AS(P(2, {{1, 2, 3}}), InvalidArgument);       // out of range
  CHECK_THROWS_AS(P(2, {{0, 1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(P(2, {{1, 2}, {}}), InvalidArgument);      // empty block
  CHECK_THROWS_AS(P(0, {}), InvalidArgument);
}

TEST_CASE("from_assignments canonicalizes arbitrary block ids") {
  std::vector<int> a = {7, 3, 7, 0, 3};
  auto p = Partition::from_assignments(a);
  CHECK(p == P(5, {{1, 3}, {2, 5}, {4}}));
  CHECK(p.assignments() == std::vector<int>{0, 1, 0, 2, 1});
}

TEST_CASE("block sizes helpers") {
  BlockSizes b({3, 1, 2});
  CHECK(b.n() == 6);
  CHECK(b.k() == 3);
  CHECK(b.with_incremented(1).sizes == std::vector<int>{3, 2, 2});
  CHECK(b.with_appended_singleton().sizes == std::vector<int>{3, 1, 2, 1});
  CHECK(b.without(0).sizes == std::vector<int>{1, 2});
  CHECK_THROWS_AS(b.with_incremented(3), InvalidArgument);
  CHECK_THROWS_AS(b.without(-1), InvalidArgument);
  CHECK_THROWS_AS(BlockSizes({2, 0}), InvalidArgument);
}

TEST_CASE("induced partition groups equal labels") {
  LabelSequence seq = {Label::atom(1), Label::fresh(0), Label::atom(1)};
  CHECK(induced_partition(seq) == P(3, {{1, 3}, {2}}));

  LabelSequence same = {Label::atom(2), Label::atom(2), Label::atom(2)};
  CHECK(induced_partition(same) == P(3, {{1, 2, 3}}));

  LabelSequence fresh = {Label::fresh(4), Label::fresh(1), Label::fresh(9)};
  CHECK(induced_partition(fresh) == P(3, {{1}, {2}, {3}}));

  LabelSequence mixed = {Label::fresh(0), Label::atom(3), Label::fresh(0), Label::atom(1)};
  CHECK(induced_partition(mixed) == P(4, {{1, 3}, {2}, {4}}));

  LabelSequence empty;
  CHECK_THROWS_AS(induced_partition(empty), InvalidArgument);
}

TEST_CASE("induced partition depends only on the equality pattern") {
  std::mt19937_64 g(11);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 1 + static_cast<int>(g() % 8);
    std::vector<int> raw(static_cast<size_t>(n));
    for (int& v : raw) v = static_cast<int>(g() % 4);
    // Same pattern rendered two ways: as atoms 1..4 and as atoms 11..14
    // with one value swapped to a shared fresh token.
    LabelSequence s1, s2;
    for (int v : raw) {
      s1.push_back(Label::atom(v + 1));
      s2.push_back(v == 0 ? Label::fresh(42) : Label::atom(v + 10));
    }
    CHECK(induced_partition(s1) == induced_partition(s2));
  }
}

TEST_CASE("restriction to a prefix") {
  auto p = P(5, {{1, 3, 5}, {2, 4}});
  CHECK(p.restrict_to(5) == p);
  CHECK(p.restrict_to(4) == P(4, {{1, 3}, {2, 4}}));
  CHECK(p.restrict_to(2) == P(2, {{1}, {2}}));
  CHECK(p.restrict_to(1) == P(1, {{1}}));
  CHECK_THROWS_AS(p.restrict_to(0), InvalidArgument);
  CHECK_THROWS_AS(p.restrict_to(6), InvalidArgument);
}

TEST_CASE("restriction tower property") {
  for (const auto& p : all_partitions(5))
    for (int m2 = 1; m2 <= 5; ++m2)
      for (int m1 = 1; m1 <= m2; ++m1)
        CHECK(p.restrict_to(m2).restrict_to(m1) == p.restrict_to(m1));
}

TEST_CASE("enumeration counts match Bell numbers and is duplicate-free") {
  for (int n = 1; n <= 9; ++n) {
    unsigned long long count = 0;
    for_each_partition(n, [&](const Partition& p) {
      ++count;
      CHECK(p.n() == n);
    });
    CHECK(count == oracle::bell_number(n));
  }
  std::set<Partition> seen;
  for_each_partition(7, [&](const Partition& p) { seen.insert(p); });
  CHECK(seen.size() == oracle::bell_number(7));
}

TEST_CASE("restriction of partitions of n+1 covers partitions of n") {
  // Every partition of {1..6} arises as a restriction, Bell(7)/... times.
  std::map<Partition, int> hits;
  for_each_partition(6, [&](const Partition& p) { hits[p.restrict_to(5)] += 1; });
  CHECK(hits.size() == oracle::bell_number(5));
  for (const auto& [p, c] : hits) CHECK(c == p.block_count() + 1);
}

TEST_CASE("enumeration cap") {
  CHECK(partition_enumeration_cap() >= 10);
  CHECK_THROWS_AS(for_each_partition(6, [](const Partition&) {}, 5), ResourceLimit);
  CHECK_THROWS_AS(for_each_partition(0, [](const Partition&) {}), InvalidArgument);
  CHECK_NOTHROW(for_each_partition(5, [](const Partition&) {}, 5));
}

TEST_CASE("ordering is total and consistent with equality") {
  auto ps = all_partitions(4);
  std::sort(ps.begin(), ps.end());
  for (size_t i = 0; i + 1 < ps.size(); ++i) {
    CHECK(ps[i] < ps[i + 1]);
    CHECK(!(ps[i + 1] < ps[i]));
    CHECK(!(ps[i] == ps[i + 1]));
  }
}
