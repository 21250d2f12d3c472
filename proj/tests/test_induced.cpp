#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "atompart/induced.hpp"
#include "oracle_helpers.hpp"

using namespace atompart;
using doctest::Approx;

namespace {
const EppfModel& py_half() {
  static const EppfModel m = EppfModel::pitman_yor(0.5, 1.0);
  return m;
}

double general(const EppfModel& m, const BaseMeasure& h, std::vector<int> sizes) {
  return induced_eppf_general(m, h, BlockSizes(std::move(sizes))).value;
}

// Count set partitions of {1..n} whose sorted block sizes equal `parts`.
long count_partitions_with_sizes(int n, std::vector<int> parts) {
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  long c = 0;
  for_each_partition(n, [&](const Partition& p) {
    auto s = p.block_sizes().sizes;
    std::sort(s.begin(), s.end(), std::greater<int>());
    if (s == parts) ++c;
  });
  return c;
}
}  // namespace

TEST_CASE("occupancy enumeration") {
  std::vector<std::vector<int>> seen;
  for_each_occupancy(BlockSizes({2, 1}), [&](const OccupancyVector& m) { seen.push_back(m.m); });
  CHECK(seen == std::vector<std::vector<int>>{{1, 1}, {2, 1}});

  int count = 0;
  for_each_occupancy(BlockSizes({3, 2, 2}), [&](const OccupancyVector& m) {
    ++count;
    REQUIRE(m.n == std::vector<int>{3, 2, 2});
  });
  CHECK(count == 3 * 2 * 2);
}

TEST_CASE("integer partitions into fixed part counts") {
  CHECK(partitions_into_parts(3, 2) == std::vector<std::vector<int>>{{2, 1}});
  CHECK(partitions_into_parts(4, 2) == std::vector<std::vector<int>>{{3, 1}, {2, 2}});
  CHECK(partitions_into_parts(5, 1) == std::vector<std::vector<int>>{{5}});
  CHECK(partitions_into_parts(4, 4) == std::vector<std::vector<int>>{{1, 1, 1, 1}});
  CHECK(partitions_into_parts(3, 4).empty());
  CHECK_THROWS_AS(partitions_into_parts(-1, 2), InvalidArgument);
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k)
      CHECK(partitions_into_parts(n, k) == oracle::integer_partitions(n, k));
}

TEST_CASE("profile enumeration is the product of per-block splits") {
  int count = 0;
  for_each_profile(BlockSizes({4, 3}), OccupancyVector({2, 2}, {4, 3}),
                   [&](const BlockProfile& p) {
                     ++count;
                     CHECK(p.table_counts() == std::vector<int>{2, 2});
                     CHECK(p.realized_sizes().size() == 4);
                   });
  CHECK(count == 2 * 1);  // {3,1},{2,2} x {2,1}

  for_each_profile(BlockSizes({3}), OccupancyVector({3}, {3}), [&](const BlockProfile& p) {
    CHECK(p.parts == std::vector<std::vector<int>>{{1, 1, 1}});
    CHECK(p.lambda(0) == std::vector<int>{3});
  });
  BlockProfile mixed{{{3, 1, 1}}};
  CHECK(mixed.lambda(0) == std::vector<int>{2, 0, 1});
}

TEST_CASE("profile realization counts") {
  BlockProfile two_one{{{2, 1}}};
  CHECK(c_lambda(two_one) == Approx(3.0).epsilon(1e-13));
  BlockProfile two_two{{{2, 2}}};
  CHECK(c_lambda(two_two) == Approx(3.0).epsilon(1e-13));
  BlockProfile three_one{{{3, 1}}};
  CHECK(c_lambda(three_one) == Approx(4.0).epsilon(1e-13));
  BlockProfile singletons{{{1, 1, 1, 1}}};
  CHECK(c_lambda(singletons) == Approx(1.0).epsilon(1e-13));
  BlockProfile multi{{{2, 1}, {2, 2}}};
  CHECK(c_lambda(multi) == Approx(9.0).epsilon(1e-13));

  // Against brute-force counting of set partitions with prescribed sizes.
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (const auto& parts : partitions_into_parts(n, k)) {
        BlockProfile pr{{parts}};
        CHECK(c_lambda(pr) == Approx(static_cast<double>(
                                  count_partitions_with_sizes(n, parts)))
                                  .epsilon(1e-12));
      }
}

TEST_CASE("EPPF at a profile") {
  BlockProfile pr{{{2}, {1}}};
  CHECK(q_tilde(py_half(), pr).value() == Approx(0.125).epsilon(1e-13));
  BlockProfile pr2{{{1}, {1}}};
  CHECK(q_tilde(py_half(), pr2).value() == Approx(0.75).epsilon(1e-13));
  // Same realized multiset through different groupings: same value.
  BlockProfile a{{{2, 1}, {1}}};
  BlockProfile b{{{2}, {1, 1}}};
  CHECK(q_tilde(py_half(), a).value() == Approx(q_tilde(py_half(), b).value()).epsilon(1e-14));
}

TEST_CASE("diffuse base measure: induced law equals the latent EPPF") {
  auto h = BaseMeasure::from_atoms({});
  for (const auto& m : {py_half(), EppfModel::pitman_yor(0.0, 2.0),
                        EppfModel::pitman_yor(-0.5, 1.5)}) {
    for (int n = 1; n <= 6; ++n)
      for_each_partition(n, [&](const Partition& p) {
        auto r = induced_eppf_general(m, h, p.block_sizes());
        double ref = m.eppf(p.block_sizes()).value();
        CHECK(r.value == Approx(ref).epsilon(1e-12).scale(1.0));
        CHECK(r.error_bound == 0.0);
      });
  }
}

TEST_CASE("worked spike values across all methods") {
  auto h = BaseMeasure::spike_slab(0.3);
  const double p2 = 0.3175, p11 = 0.6825;
  CHECK(general(py_half(), h, {2}) == Approx(p2).epsilon(1e-13));
  CHECK(general(py_half(), h, {1, 1}) == Approx(p11).epsilon(1e-13));
  CHECK(induced_eppf_gibbs(py_half(), h, BlockSizes({2})).value == Approx(p2).epsilon(1e-13));
  CHECK(induced_eppf_spike_slab(py_half(), 0.3, BlockSizes({2})).value ==
        Approx(p2).epsilon(1e-12));
  CHECK(induced_eppf_spike_slab(py_half(), 0.3, BlockSizes({1, 1})).value ==
        Approx(p11).epsilon(1e-12));
  auto law = oracle_induced_law(py_half(), h, 2);
  CHECK(law.at(Partition::from_blocks(2, {{1, 2}})) == Approx(p2).epsilon(1e-12));
  CHECK(law.at(Partition::from_blocks(2, {{1}, {2}})) == Approx(p11).epsilon(1e-12));
}

TEST_CASE("induced law sums to one") {
  std::vector<BaseMeasure> hs = {BaseMeasure::spike_slab(0.0), BaseMeasure::spike_slab(0.3),
                                 BaseMeasure::spike_slab(1.0),
                                 BaseMeasure::from_atoms({0.2, 0.1})};
  std::vector<EppfModel> ms = {py_half(), EppfModel::pitman_yor(0.25, 0.5),
                               EppfModel::pitman_yor(0.0, 1.0),
                               EppfModel::pitman_yor(-0.5, 1.5)};
  for (const auto& m : ms)
    for (const auto& h : hs)
      for (int n = 1; n <= 6; ++n) {
        LogReal total;
        for_each_partition(n, [&](const Partition& p) {
          total += LogReal::from_value(induced_eppf_general(m, h, p.block_sizes()).value);
        });
        CHECK(total.value() == Approx(1.0).epsilon(1e-10));
      }
}

TEST_CASE("Gibbs shortcut equals the general sum") {
  std::vector<BaseMeasure> hs = {BaseMeasure::spike_slab(0.3),
                                 BaseMeasure::from_atoms({0.2, 0.1}),
                                 BaseMeasure::from_atoms({0.3, 0.15, 0.05})};
  std::vector<EppfModel> ms = {py_half(), EppfModel::pitman_yor(0.25, 0.5),
                               EppfModel::pitman_yor(0.0, 1.0),
                               EppfModel::pitman_yor(-0.5, 1.5),
                               EppfModel::gibbs(0.5, py_v_table(0.5, 1.0, 8))};
  for (const auto& m : ms)
    for (const auto& h : hs)
      for (int n = 1; n <= 6; ++n)
        for_each_partition(n, [&](const Partition& p) {
          auto a = induced_eppf_general(m, h, p.block_sizes());
          auto b = induced_eppf_gibbs(m, h, p.block_sizes());
          CHECK(b.value == Approx(a.value).epsilon(1e-10).scale(1.0));
        });

  auto cu = EppfModel::custom([](std::span<const int> s) {
    return EppfModel::pitman_yor(0.5, 1.0).eppf(s).log();
  });
  CHECK_THROWS_AS(induced_eppf_gibbs(cu, hs[0], BlockSizes({2})), InvalidArgument);
}

TEST_CASE("spike-and-slab closed form equals the general sum") {
  for (double a : {0.0, 0.3, 0.7, 1.0}) {
    auto h = BaseMeasure::spike_slab(a);
    std::vector<EppfModel> ms = {py_half(), EppfModel::pitman_yor(0.0, 1.0),
                                 EppfModel::pitman_yor(-0.5, 1.5)};
    for (const auto& m : ms)
      for (int n = 1; n <= 5; ++n)
        for_each_partition(n, [&](const Partition& p) {
          auto g = induced_eppf_general(m, h, p.block_sizes());
          auto s = induced_eppf_spike_slab(m, a, p.block_sizes());
          CHECK(s.value == Approx(g.value).epsilon(1e-10).scale(1.0));
          CHECK(s.error_bound == 0.0);
        });
  }
  CHECK_THROWS_AS(induced_eppf_spike_slab(py_half(), -0.1, BlockSizes({1})), InvalidArgument);
  CHECK_THROWS_AS(induced_eppf_spike_slab(py_half(), 1.2, BlockSizes({1})), InvalidArgument);
}

TEST_CASE("spike-and-slab generic route agrees for custom models") {
  auto py = EppfModel::pitman_yor(0.3, 0.7);
  auto cu = EppfModel::custom([py](std::span<const int> s) { return py.eppf(s).log(); });
  for (int n = 1; n <= 5; ++n)
    for_each_partition(n, [&](const Partition& p) {
      auto a = induced_eppf_spike_slab(py, 0.4, p.block_sizes());
      auto b = induced_eppf_spike_slab(cu, 0.4, p.block_sizes());
      CHECK(b.value == Approx(a.value).epsilon(1e-11).scale(1.0));
    });
}

TEST_CASE("atomic-only base measure concentrates on few blocks") {
  auto h = BaseMeasure::spike_slab(1.0);
  for (int n = 1; n <= 6; ++n)
    for_each_partition(n, [&](const Partition& p) {
      double v = general(py_half(), h, p.block_sizes().sizes);
      if (p.block_count() == 1)
        CHECK(v == Approx(1.0).epsilon(1e-12));
      else
        CHECK(v == Approx(0.0).scale(1.0).epsilon(1e-14));
    });
}

TEST_CASE("merging only loses all-singleton outcomes") {
  auto h = BaseMeasure::from_atoms({0.2, 0.1});
  for (int n = 2; n <= 6; ++n) {
    std::vector<int> ones(static_cast<size_t>(n), 1);
    CHECK(general(py_half(), h, ones) <=
          py_half().eppf(std::span<const int>(ones)).value() + 1e-15);
  }
}

TEST_CASE("brute-force law agrees with the exact computation") {
  std::vector<BaseMeasure> hs = {BaseMeasure::spike_slab(0.3),
                                 BaseMeasure::from_atoms({0.2, 0.1})};
  for (const auto& h : hs)
    for (int n = 1; n <= 5; ++n) {
      auto law = oracle_induced_law(py_half(), h, n);
      double total = 0.0;
      for (const auto& [p, v] : law) {
        CHECK(v == Approx(general(py_half(), h, p.block_sizes().sizes))
                       .epsilon(1e-10)
                       .scale(1.0));
        total += v;
      }
      CHECK(total == Approx(1.0).epsilon(1e-11));
      CHECK(oracle_induced_eppf(py_half(), h, Partition::from_blocks(1, {{1}})).value ==
            Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("induced law is exchangeable") {
  // All partitions with the same size multiset get the same mass.
  auto h = BaseMeasure::from_atoms({0.2, 0.1});
  std::map<std::vector<int>, double> by_shape;
  for_each_partition(5, [&](const Partition& p) {
    auto s = p.block_sizes().sizes;
    std::sort(s.begin(), s.end(), std::greater<int>());
    double v = general(py_half(), h, p.block_sizes().sizes);
    auto it = by_shape.find(s);
    if (it == by_shape.end())
      by_shape[s] = v;
    else
      CHECK(v == Approx(it->second).epsilon(1e-12).scale(1.0));
  });
  CHECK(by_shape.size() == 7);  // integer partitions of 5
}

TEST_CASE("induced law is consistent under adding one observation") {
  auto h = BaseMeasure::spike_slab(0.3);
  auto m = py_half();
  for (int n = 1; n <= 4; ++n) {
    std::map<Partition, double> child_mass;
    for_each_partition(n + 1, [&](const Partition& p) {
      child_mass[p.restrict_to(n)] += general(m, h, p.block_sizes().sizes);
    });
    for_each_partition(n, [&](const Partition& p) {
      CHECK(child_mass.at(p) ==
            Approx(general(m, h, p.block_sizes().sizes)).epsilon(1e-10).scale(1.0));
    });
  }
}

TEST_CASE("joint atom probabilities") {
  auto spike = BaseMeasure::spike_slab(0.3);
  CHECK(joint_atom_probability(py_half(), spike, std::vector<int>{1}) ==
        Approx(0.3).epsilon(1e-14));
  // Two observations on the same atom: q(2) a + q(1,1) a^2.
  CHECK(joint_atom_probability(py_half(), spike, std::vector<int>{1, 1}) ==
        Approx(0.1425).epsilon(1e-13));
  auto two = BaseMeasure::from_atoms({0.2, 0.1});
  // Distinct atoms force distinct latent blocks.
  CHECK(joint_atom_probability(py_half(), two, std::vector<int>{1, 2}) ==
        Approx(0.75 * 0.02).epsilon(1e-13));
  CHECK_THROWS_AS(joint_atom_probability(py_half(), two, std::vector<int>{0, 1}),
                  InvalidArgument);
  CHECK_THROWS_AS(joint_atom_probability(py_half(), two, std::vector<int>{3}),
                  InvalidArgument);
}

TEST_CASE("atom/diffuse event probabilities partition the sample space") {
  // P over all assignments of each observation to {atom 1..A, diffuse}:
  // sum over latent partitions, each block weighted by the measure of the
  // intersected target set. Checks the atom-hit law against first
  // principles and that the total is one.
  auto m = py_half();
  auto h = BaseMeasure::from_atoms({0.2, 0.1});
  const int A = h.atom_count();
  for (int n = 1; n <= 4; ++n) {
    double total = 0.0;
    std::vector<int> choice(static_cast<size_t>(n), 0);  // 0 = diffuse
    for (;;) {
      double prob = 0.0;
      for_each_partition(n, [&](const Partition& p) {
        double w = m.eppf(p.block_sizes()).value();
        for (const auto& block : p.blocks()) {
          int c0 = choice[static_cast<size_t>(block[0] - 1)];
          bool same = true;
          for (int el : block)
            if (choice[static_cast<size_t>(el - 1)] != c0) same = false;
          if (!same)
            w = 0.0;
          else
            w *= c0 == 0 ? h.diffuse_mass() : h.atom_weight(c0);
        }
        prob += w;
      });
      total += prob;
      bool all_atoms = true;
      for (int c : choice)
        if (c == 0) all_atoms = false;
      if (all_atoms)
        CHECK(prob ==
              Approx(joint_atom_probability(m, h, choice)).epsilon(1e-12).scale(1.0));
      int i = n - 1;
      while (i >= 0 && choice[static_cast<size_t>(i)] == A) choice[static_cast<size_t>(i--)] = 0;
      if (i < 0) break;
      ++choice[static_cast<size_t>(i)];
    }
    CHECK(total == Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("tail-truncated families carry an error bound") {
  auto h = BaseMeasure::geometric(0.5, 10, 0.6);
  auto r = induced_eppf_general(py_half(), h, BlockSizes({2, 1}));
  CHECK(r.error_bound > 0.0);
  auto fine = BaseMeasure::geometric(0.5, 30, 0.6);
  auto rf = induced_eppf_general(py_half(), fine, BlockSizes({2, 1}));
  CHECK(std::abs(r.value - rf.value) <= r.error_bound + rf.error_bound + 1e-12);
  CHECK(oracle_induced_eppf(py_half(), h, Partition::from_blocks(2, {{1, 2}})).error_bound >
        0.0);
}

TEST_CASE("enumeration caps map to resource errors") {
  auto h = BaseMeasure::spike_slab(0.3);
  CHECK_THROWS_AS(induced_eppf_general(py_half(), h, BlockSizes(std::vector<int>(11, 1))),
                  ResourceLimit);
  CHECK_THROWS_AS(induced_eppf_general(py_half(), h, BlockSizes({3, 2}), 4), ResourceLimit);
  CHECK_THROWS_AS(oracle_induced_law(py_half(), h, 9), ResourceLimit);
}
