#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "atompart/eppf.hpp"
#include "atompart/partition.hpp"
#include "oracle_helpers.hpp"

using namespace atompart;
using doctest::Approx;

namespace {
double q(const EppfModel& m, std::vector<int> sizes) {
  return m.eppf(std::span<const int>(sizes)).value();
}

const std::vector<EppfModel>& model_grid() {
  static const std::vector<EppfModel> grid = {
      EppfModel::pitman_yor(0.0, 1.0),
      EppfModel::pitman_yor(0.25, 0.5),
      EppfModel::pitman_yor(0.5, 1.0),
      EppfModel::pitman_yor(-0.5, 1.5),
  };
  return grid;
}
}  // namespace

TEST_CASE("Pitman-Yor EPPF closed-form values") {
  auto py = EppfModel::pitman_yor(0.5, 1.0);
  CHECK(q(py, {}) == 1.0);
  CHECK(q(py, {1}) == 1.0);
  CHECK(q(py, {2}) == Approx(0.25).epsilon(1e-14));
  CHECK(q(py, {1, 1}) == Approx(0.75).epsilon(1e-14));
  // n=3: q(3) = (1-s)_2/(t+1)_2 = (0.5*1.5)/(2*3); q(2,1) = (t+s)(1-s)/(2*3)
  CHECK(q(py, {3}) == Approx(0.125).epsilon(1e-14));
  CHECK(q(py, {2, 1}) == Approx(0.125).epsilon(1e-14));
  CHECK(q(py, {1, 1, 1}) == Approx((1.0 + 0.5) * (1.0 + 1.0) / 6.0).epsilon(1e-14));

  auto dp = EppfModel::pitman_yor(0.0, 1.0);  // theta = 1 Dirichlet process
  CHECK(q(dp, {2}) == Approx(0.5).epsilon(1e-14));
  CHECK(q(dp, {1, 1}) == Approx(0.5).epsilon(1e-14));
  // n=5, k=2: theta^(k-1) * 2! * 1! / (theta+1)_4 = 2 / 120
  CHECK(q(dp, {3, 2}) == Approx(2.0 / 120.0).epsilon(1e-14));
}

TEST_CASE("EPPF is symmetric in block order") {
  for (const auto& m : model_grid()) {
    CHECK(q(m, {3, 1, 2}) == q(m, {1, 2, 3}));
    CHECK(q(m, {2, 5}) == q(m, {5, 2}));
    CHECK(m.eppf(std::vector<int>{4, 1, 1}).log() == m.eppf(std::vector<int>{1, 4, 1}).log());
  }
}

TEST_CASE("negative sigma caps the number of blocks") {
  auto m = EppfModel::pitman_yor(-0.5, 1.5);  // m = 3 blocks max
  CHECK(m.max_blocks() == 3);
  CHECK(q(m, {1, 1, 1}) > 0.0);
  CHECK(q(m, {1, 1, 1, 1}) == 0.0);
  CHECK(m.eppf(std::vector<int>{2, 1, 1, 1}).is_zero());
}

TEST_CASE("addition rule: q(n) = sum of one-step extensions") {
  for (const auto& m : model_grid()) {
    for (int n = 1; n <= 7; ++n) {
      for_each_partition(n, [&](const Partition& p) {
        BlockSizes b = p.block_sizes();
        LogReal total = m.eppf(b.with_appended_singleton());
        for (int i = 0; i < b.k(); ++i) total += m.eppf(b.with_incremented(i));
        double lhs = m.eppf(b).value();
        if (lhs == 0.0)
          CHECK(total.value() == 0.0);
        else
          CHECK(total.value() == Approx(lhs).epsilon(1e-12));
      });
    }
  }
}

TEST_CASE("EPPF sums to one over set partitions") {
  for (const auto& m : model_grid()) {
    for (int n = 1; n <= 8; ++n) {
      LogReal total;
      for_each_partition(n, [&](const Partition& p) { total += m.eppf(p.block_sizes()); });
      CHECK(total.value() == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Pitman-Yor V-table values and validation") {
  VTable t = py_v_table(0.5, 1.0, 30);
  CHECK(t.v(1, 1).value() == Approx(1.0).epsilon(1e-15));
  CHECK(t.v(2, 1).value() == Approx(0.5).epsilon(1e-14));
  CHECK(t.v(2, 2).value() == Approx(0.75).epsilon(1e-14));
  CHECK(t.v(3, 2).value() == Approx(1.5 / 6.0).epsilon(1e-14));
  CHECK_NOTHROW(t.validate());
  CHECK_THROWS_AS(t.v(0, 1), InvalidArgument);
  CHECK_THROWS_AS(t.v(3, 4), InvalidArgument);
  CHECK_THROWS_AS(t.v(31, 1), InvalidArgument);

  for (double sigma : {-0.5, 0.0, 0.25, 0.9}) {
    VTable u = py_v_table(sigma, 2.0, 50);
    CHECK_NOTHROW(u.validate());
  }
}

TEST_CASE("corrupted V-table fails validation") {
  VTable good = py_v_table(0.5, 1.0, 10);
  std::vector<double> vals;
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k) vals.push_back(good.log_v(n, k));
  vals[6] += 1e-6;  // (4,1)
  VTable bad(0.5, 10, vals);
  CHECK_THROWS_AS(bad.validate(), InvalidModel);
  CHECK_THROWS_AS(VTable(0.5, 3, {0.0, 0.0}), InvalidArgument);  // wrong length
  CHECK_THROWS_AS(VTable(1.0, 3, std::vector<double>(6, 0.0)), InvalidModel);
}

TEST_CASE("Gibbs model built from a Pitman-Yor table matches Pitman-Yor") {
  auto py = EppfModel::pitman_yor(0.5, 1.0);
  auto gb = EppfModel::gibbs(0.5, py_v_table(0.5, 1.0, 10));
  CHECK(gb.n_cap() == 10);
  for (int n = 1; n <= 10; ++n) {
    for_each_partition(n, [&](const Partition& p) {
      double a = py.eppf(p.block_sizes()).value();
      double b = gb.eppf(p.block_sizes()).value();
      CHECK(b == Approx(a).epsilon(1e-12));
    });
  }
  CHECK_THROWS_AS(gb.eppf(std::vector<int>{6, 5}), ResourceLimit);
  CHECK_THROWS_AS(EppfModel::gibbs(0.4, py_v_table(0.5, 1.0, 5)), InvalidModel);
}

TEST_CASE("generalized Stirling numbers match the definitional sum") {
  for (double sigma : {-0.5, 0.0, 0.25, 0.5, 0.9}) {
    StirlingTable t(sigma, 12);
    for (int n = 0; n <= 12; ++n)
      for (int k = 0; k <= n; ++k) {
        double ref = oracle::stirling_lambda_sum(sigma, n, k);
        double got = t.s(n, k).value();
        if (ref == 0.0)
          CHECK(got == 0.0);
        else
          CHECK(got == Approx(ref).epsilon(1e-9));
      }
  }
  CHECK(stirling_sigma(0.5, 3, 2).value() == Approx(1.5).epsilon(1e-13));
  CHECK(stirling_sigma(0.5, 1, 1).value() == Approx(1.0));
  CHECK(stirling_sigma(0.25, 4, 5).is_zero());
}

TEST_CASE("sigma = 0 reduces to unsigned Stirling numbers of the first kind") {
  StirlingTable t(0.0, 10);
  for (int n = 0; n <= 10; ++n)
    for (int k = 0; k <= n; ++k) {
      double got = t.s(n, k).value();
      auto ref = static_cast<double>(oracle::stirling1_unsigned(n, k));
      if (ref == 0.0)
        CHECK(got == 0.0);
      else
        CHECK(got == Approx(ref).epsilon(1e-12));
    }
  CHECK(t.s(4, 2).value() == Approx(11.0).epsilon(1e-13));
  CHECK_THROWS_AS(StirlingTable(1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(StirlingTable(0.5, 5000), ResourceLimit);
}

TEST_CASE("predictive weights follow EPPF ratios") {
  auto py = EppfModel::pitman_yor(0.5, 1.0);
  auto w = py.predictive_weights(BlockSizes({1}));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Approx(0.25).epsilon(1e-13));
  CHECK(w[1] == Approx(0.75).epsilon(1e-13));

  auto dp = EppfModel::pitman_yor(0.0, 1.0);
  auto w2 = dp.predictive_weights(BlockSizes({2, 1}));
  REQUIRE(w2.size() == 3);
  CHECK(w2[0] == Approx(0.5).epsilon(1e-13));
  CHECK(w2[1] == Approx(0.25).epsilon(1e-13));
  CHECK(w2[2] == Approx(0.25).epsilon(1e-13));

  CHECK(py.predictive_weights(BlockSizes()) == std::vector<double>{1.0});

  for (const auto& m : model_grid())
    for (int n = 1; n <= 6; ++n)
      for_each_partition(n, [&](const Partition& p) {
        if (m.eppf(p.block_sizes()).is_zero()) return;
        double total = 0.0;
        for (double x : m.predictive_weights(p.block_sizes())) {
          CHECK(x >= 0.0);
          total += x;
        }
        CHECK(total == Approx(1.0).epsilon(1e-12));
      });

  // Saturated negative-sigma model: new-block mass is exactly zero.
  auto neg = EppfModel::pitman_yor(-0.5, 1.5);
  auto w3 = neg.predictive_weights(BlockSizes({1, 1, 1}));
  CHECK(w3.back() == 0.0);
  CHECK_THROWS_AS(neg.predictive_weights(BlockSizes({1, 1, 1, 1})), InvalidState);
}

TEST_CASE("custom model wrapping Pitman-Yor agrees with the native one") {
  auto py = EppfModel::pitman_yor(0.3, 0.7);
  auto cu = EppfModel::custom(
      [py](std::span<const int> sizes) { return py.eppf(sizes).log(); });
  CHECK(!cu.has_sigma());
  CHECK_THROWS_AS(cu.sigma(), InvalidState);
  for (int n = 1; n <= 6; ++n)
    for_each_partition(n, [&](const Partition& p) {
      CHECK(cu.eppf(p.block_sizes()).value() ==
            Approx(py.eppf(p.block_sizes()).value()).epsilon(1e-12));
      auto wa = py.predictive_weights(p.block_sizes());
      auto wb = cu.predictive_weights(p.block_sizes());
      REQUIRE(wa.size() == wb.size());
      for (size_t i = 0; i < wa.size(); ++i) CHECK(wb[i] == Approx(wa[i]).epsilon(1e-10));
    });

  auto nan_model = EppfModel::custom([](std::span<const int>) { return std::nan(""); });
  CHECK_THROWS_AS(nan_model.eppf(std::vector<int>{1}), InvalidState);
  auto big = EppfModel::custom([](std::span<const int>) { return 1.0; });  // q > 1
  CHECK_THROWS_AS(big.eppf(std::vector<int>{1, 1}), InvalidState);
  CHECK_THROWS_AS(EppfModel::custom(nullptr), InvalidModel);
}

TEST_CASE("parameter domain validation") {
  CHECK_THROWS_AS(EppfModel::pitman_yor(1.0, 1.0), InvalidModel);
  CHECK_THROWS_AS(EppfModel::pitman_yor(0.5, -0.5), InvalidModel);
  CHECK_THROWS_AS(EppfModel::pitman_yor(0.5, -0.6), InvalidModel);
  CHECK_NOTHROW(EppfModel::pitman_yor(0.5, -0.49));
  CHECK_THROWS_AS(EppfModel::pitman_yor(-0.5, 1.4), InvalidModel);  // not a multiple
  CHECK_NOTHROW(EppfModel::pitman_yor(-0.7, 2.1));                  // m = 3
  CHECK_THROWS_AS(EppfModel::pitman_yor(-0.5, 0.0), InvalidModel);
  CHECK_THROWS_AS(py_v_table(0.5, 1.0, 0), InvalidArgument);
}

TEST_CASE("sequential sampler matches the EPPF law") {
  auto py = EppfModel::pitman_yor(0.5, 1.0);
  std::mt19937_64 g(123);

  CHECK(py.sample_latent_partition(1, g).block_count() == 1);

  int merged = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i)
    if (py.sample_latent_partition(2, g).block_count() == 1) ++merged;
  // q(2) = 0.25; 4 sigma band at 1e5 draws.
  CHECK(std::abs(merged / static_cast<double>(reps) - 0.25) < 0.0055);

  auto neg = EppfModel::pitman_yor(-0.5, 1.5);
  const int nreps = 4000;
  int saw_three = 0;
  for (int i = 0; i < nreps; ++i) {
    auto p = neg.sample_latent_partition(10, g);
    CHECK(p.block_count() <= 3);
    if (p.block_count() == 3) ++saw_three;
  }
  // P(K_10 = 3) = V_{10,3} S_sigma(10,3); 4 sigma band.
  LogReal p3 = py_v_table(-0.5, 1.5, 10).v(10, 3);
  p3 *= stirling_sigma(-0.5, 10, 3);
  double expect = p3.value();
  CHECK(std::abs(saw_three / static_cast<double>(nreps) - expect) <
        4.0 * std::sqrt(expect * (1.0 - expect) / nreps));
}

TEST_CASE("samplers for equivalent models induce the same law") {
  auto py = EppfModel::pitman_yor(0.5, 1.0);
  auto gb = EppfModel::gibbs(0.5, py_v_table(0.5, 1.0, 8));
  std::map<Partition, double> fa, fb, exact;
  const int reps = 100000;
  std::mt19937_64 g1(7), g2(7);
  for (int i = 0; i < reps; ++i) {
    fa[py.sample_latent_partition(4, g1)] += 1.0 / reps;
    fb[gb.sample_latent_partition(4, g2)] += 1.0 / reps;
  }
  for_each_partition(4, [&](const Partition& p) {
    exact[p] = py.eppf(p.block_sizes()).value();
  });
  CHECK(oracle::tv_distance(fa, exact) < 0.01);
  CHECK(oracle::tv_distance(fb, exact) < 0.01);
  CHECK(oracle::tv_distance(fa, fb) < 0.01);
}

TEST_CASE("same engine state reproduces the same partitions") {
  auto py = EppfModel::pitman_yor(0.25, 2.0);
  std::mt19937_64 g1(99), g2(99);
  for (int i = 0; i < 50; ++i)
    CHECK(py.sample_latent_partition(20, g1) == py.sample_latent_partition(20, g2));
}
