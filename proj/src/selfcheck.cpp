#include "atompart/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "atompart/asymptotics.hpp"
#include "atompart/base_measure.hpp"
#include "atompart/eppf.hpp"
#include "atompart/induced.hpp"
#include "atompart/io.hpp"
#include "atompart/partition.hpp"

namespace atompart {

namespace {

struct Failure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure{message};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<unsigned long long> bell_numbers(int n_max) {
  std::vector<std::vector<unsigned long long>> tri;
  tri.push_back({1});
  for (int i = 1; i <= n_max; ++i) {
    std::vector<unsigned long long> row;
    row.push_back(tri.back().back());
    for (unsigned long long v : tri.back()) row.push_back(row.back() + v);
    tri.push_back(std::move(row));
  }
  std::vector<unsigned long long> bell;
  for (int i = 0; i <= n_max; ++i) bell.push_back(tri[static_cast<size_t>(i)].front());
  return bell;
}

// Definitional sum over integer partitions lambda of n with k parts:
// n! / prod_j lambda_j!(j!)^lambda_j * prod_parts (1-sigma)_{part-1}.
double stirling_by_lambda_sum(double sigma, int n, int k) {
  double total = 0.0;
  for (const auto& parts : partitions_into_parts(n, k)) {
    double lg = log_factorial(n);
    size_t i = 0;
    while (i < parts.size()) {
      size_t j = i;
      while (j < parts.size() && parts[j] == parts[i]) ++j;
      long mult = static_cast<long>(j - i);
      lg -= log_factorial(mult) + static_cast<double>(mult) * log_factorial(parts[i]);
      i = j;
    }
    for (int p : parts) lg += log_rising(1.0 - sigma, p - 1);
    total += std::exp(lg);
  }
  return total;
}

unsigned long long stirling1_unsigned(int n, int k) {
  if (n == 0 && k == 0) return 1;
  if (n == 0 || k == 0 || k > n) return 0;
  return stirling1_unsigned(n - 1, k - 1) +
         static_cast<unsigned long long>(n - 1) * stirling1_unsigned(n - 1, k);
}

// P(a fixed grouping of t dishes into consecutive groups of sizes m is
// realized) by brute enumeration of dish assignments: index 0 is a fresh
// draw (unique per position), 1..A the atoms.
double dish_pattern_direct(const BaseMeasure& h, const std::vector<int>& m) {
  int t = 0;
  for (int v : m) t += v;
  std::vector<int> group(static_cast<size_t>(t));
  int pos = 0;
  for (size_t g = 0; g < m.size(); ++g)
    for (int j = 0; j < m[g]; ++j) group[static_cast<size_t>(pos++)] = static_cast<int>(g);
  int atoms = h.atom_count();
  double fresh_w = h.diffuse_mass() + h.tail_mass();
  double total = 0.0;
  std::vector<int> dish(static_cast<size_t>(t), 0);
  for (;;) {
    // pattern of this assignment: equal iff same positive label
    bool match = true;
    for (int i = 0; i < t && match; ++i)
      for (int j = i + 1; j < t && match; ++j) {
        bool equal = dish[static_cast<size_t>(i)] != 0 &&
                     dish[static_cast<size_t>(i)] == dish[static_cast<size_t>(j)];
        if (equal != (group[static_cast<size_t>(i)] == group[static_cast<size_t>(j)]))
          match = false;
      }
    if (match) {
      double w = 1.0;
      for (int d : dish) w *= d == 0 ? fresh_w : h.atom_weight(d);
      total += w;
    }
    int i = t - 1;
    while (i >= 0 && dish[static_cast<size_t>(i)] == atoms) {
      dish[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++dish[static_cast<size_t>(i)];
  }
  return total;
}

void a_ml_direct_rec(const BaseMeasure& h, const std::vector<int>& e, size_t pos,
                     std::uint32_t used, double acc, double& total) {
  if (pos == e.size()) {
    total += acc;
    return;
  }
  for (int j = 1; j <= h.atom_count(); ++j) {
    if (used & (1u << j)) continue;
    a_ml_direct_rec(h, e, pos + 1, used | (1u << j),
                    acc * std::pow(h.atom_weight(j), e[pos]), total);
  }
}

double a_ml_direct(const BaseMeasure& h, std::vector<int> m_star, int ell) {
  std::vector<int> e = std::move(m_star);
  e.insert(e.end(), static_cast<size_t>(ell), 1);
  if (e.empty()) return 1.0;
  double total = 0.0;
  a_ml_direct_rec(h, e, 0, 0, 1.0, total);
  return total;
}

double chi_square_quantile(double df, double z) {
  double t = 2.0 / (9.0 * df);
  double w = 1.0 - t + z * std::sqrt(t);
  return df * w * w * w;
}

bool stats_equal(const CheckpointStats& a, const CheckpointStats& b) {
  return a.n == b.n && a.latent_blocks == b.latent_blocks &&
         a.diffuse_blocks == b.diffuse_blocks && a.atom_clusters == b.atom_clusters &&
         a.merged_blocks == b.merged_blocks && a.block_mass == b.block_mass &&
         a.small_counts == b.small_counts;
}

std::vector<EppfModel> py_grid() {
  return {EppfModel::pitman_yor(0.0, 1.0), EppfModel::pitman_yor(0.25, 0.5),
          EppfModel::pitman_yor(0.5, 1.0), EppfModel::pitman_yor(-0.5, 1.5)};
}

void check_partition_enumeration() {
  auto bell = bell_numbers(9);
  for (int n = 1; n <= 9; ++n) {
    unsigned long long count = 0;
    for_each_partition(n, [&](const Partition&) { ++count; });
    require(count == bell[static_cast<size_t>(n)],
            "partition count mismatch at n=" + std::to_string(n));
  }
  std::set<std::vector<int>> seen;
  for_each_partition(6, [&](const Partition& p) { seen.insert(p.assignments()); });
  require(seen.size() == bell[6], "duplicate partitions in enumeration");
  for_each_partition(5, [&](const Partition& p) {
    for (int m2 = 1; m2 <= 5; ++m2)
      for (int m1 = 1; m1 <= m2; ++m1)
        require(p.restrict_to(m2).restrict_to(m1) == p.restrict_to(m1),
                "restriction tower violated");
  });
}

void check_eppf_identities() {
  for (const auto& model : py_grid()) {
    for (int n = 1; n <= 6; ++n) {
      for_each_partition(n, [&](const Partition& p) {
        BlockSizes sizes = p.block_sizes();
        double q = model.eppf(sizes).value();
        std::vector<int> rev(sizes.sizes.rbegin(), sizes.sizes.rend());
        require(model.eppf(rev).value() == q, "eppf not symmetric");
        double total = model.eppf(sizes.with_appended_singleton()).value();
        for (int i = 0; i < sizes.k(); ++i) total += model.eppf(sizes.with_incremented(i)).value();
        require(std::abs(total - q) <= 1e-12 * std::max(1.0, q), "addition rule violated");
      });
    }
  }
}

void check_eppf_normalization() {
  for (const auto& model : py_grid()) {
    for (int n = 1; n <= 7; ++n) {
      double total = 0.0;
      for_each_partition(n, [&](const Partition& p) { total += model.eppf(p.block_sizes()).value(); });
      require(std::abs(total - 1.0) <= 1e-10,
              "eppf normalization off by " + fmt(total - 1.0) + " at n=" + std::to_string(n));
    }
  }
}

void check_v_table_recursion(const std::optional<EppfModel>& user_model) {
  VTable::pitman_yor(-0.5, 1.5, 60).validate();
  VTable::pitman_yor(0.0, 1.0, 60).validate();
  VTable::pitman_yor(0.5, 1.0, 60).validate();
  if (user_model && user_model->v_table()) user_model->v_table()->validate();
}

void check_stirling_identities() {
  for (double sigma : {-0.5, 0.0, 0.25, 0.5, 0.9}) {
    StirlingTable st(sigma, 9);
    for (int n = 0; n <= 9; ++n) {
      for (int k = 0; k <= n; ++k) {
        double ours = st.s(n, k).value();
        double ref = n == 0 && k == 0 ? 1.0 : (k == 0 ? 0.0 : stirling_by_lambda_sum(sigma, n, k));
        require(std::abs(ours - ref) <= 1e-9 * std::max(1.0, std::abs(ref)),
                "stirling mismatch at sigma=" + fmt(sigma) + " n=" + std::to_string(n) +
                    " k=" + std::to_string(k));
      }
    }
  }
  StirlingTable s0(0.0, 9);
  for (int n = 0; n <= 9; ++n)
    for (int k = 0; k <= n; ++k) {
      double want = static_cast<double>(stirling1_unsigned(n, k));
      require(std::abs(s0.s(n, k).value() - want) <= 1e-9 * std::max(1.0, want),
              "sigma=0 stirling is not the unsigned first kind");
    }
}

void check_dish_pattern_law(const std::optional<BaseMeasure>& user_measure) {
  std::vector<BaseMeasure> measures;
  measures.push_back(BaseMeasure::spike_slab(0.3));
  measures.push_back(BaseMeasure::from_atoms({0.2, 0.1, 0.05}));
  if (user_measure) measures.push_back(*user_measure);
  for (const auto& h : measures) {
    int k_max = user_measure && &h == &measures.back() ? 3 : 4;
    for (int k = 1; k <= k_max; ++k) {
      double law_total = 0.0;
      for_each_partition(k, [&](const Partition& rho) {
        std::vector<int> m = rho.block_sizes().sizes;
        HSharpResult hs = h_sharp(h, OccupancyVector::dishes(m));
        double direct = dish_pattern_direct(h, m);
        require(std::abs(hs.value - direct) <= 1e-10 + hs.error_bound,
                "h_sharp disagrees with dish enumeration");
        law_total += hs.value;
      });
      double slack = static_cast<double>(k) * h.tail_mass() * (1 << k);
      require(std::abs(law_total - 1.0) <= 1e-10 + slack, "dish pattern law does not sum to 1");
    }
  }
}

void check_atom_sum_injection() {
  std::vector<BaseMeasure> measures;
  measures.push_back(BaseMeasure::from_atoms({0.2, 0.1, 0.05, 0.02}));
  measures.push_back(BaseMeasure::spike_slab(0.3));
  std::vector<std::vector<int>> m_stars = {{}, {2}, {3}, {2, 2}, {4}, {3, 2}};
  for (const auto& h : measures) {
    for (const auto& ms : m_stars) {
      for (int ell = 0; ell + static_cast<int>(ms.size()) <= 3; ++ell) {
        double ours = a_ml(h, ms, ell);
        double want = static_cast<int>(ms.size()) + ell > h.atom_count()
                          ? 0.0
                          : a_ml_direct(h, ms, ell);
        require(std::abs(ours - want) <= 1e-12, "a_ml disagrees with direct enumeration");
      }
    }
  }
}

void check_induced_normalization() {
  std::vector<std::pair<EppfModel, BaseMeasure>> configs;
  for (double a : {0.0, 0.3, 1.0})
    configs.emplace_back(EppfModel::pitman_yor(0.5, 1.0), BaseMeasure::spike_slab(a));
  configs.emplace_back(EppfModel::pitman_yor(0.0, 1.0), BaseMeasure::spike_slab(0.3));
  for (const auto& [model, h] : configs) {
    for (int n = 1; n <= 5; ++n) {
      double total = 0.0;
      for_each_partition(n, [&](const Partition& p) {
        total += induced_eppf_general(model, h, p.block_sizes()).value;
      });
      require(std::abs(total - 1.0) <= 1e-10, "induced law off by " + fmt(total - 1.0));
    }
  }
}

void check_induced_method_agreement() {
  EppfModel model = EppfModel::pitman_yor(0.5, 1.0);
  BaseMeasure spike = BaseMeasure::spike_slab(0.3);
  for (int n = 1; n <= 5; ++n) {
    auto oracle = oracle_induced_law(model, spike, n);
    for_each_partition(n, [&](const Partition& p) {
      BlockSizes sizes = p.block_sizes();
      double general = induced_eppf_general(model, spike, sizes).value;
      double gibbs = induced_eppf_gibbs(model, spike, sizes).value;
      double ss = induced_eppf_spike_slab(model, 0.3, sizes).value;
      auto it = oracle.find(p);
      double orc = it == oracle.end() ? 0.0 : it->second;
      require(std::abs(general - gibbs) <= 1e-10 && std::abs(general - ss) <= 1e-10 &&
                  std::abs(general - orc) <= 1e-10,
              "induced methods disagree on a spike measure");
    });
  }
  BaseMeasure two = BaseMeasure::from_atoms({0.2, 0.1});
  for (int n = 1; n <= 4; ++n) {
    auto oracle = oracle_induced_law(model, two, n);
    for_each_partition(n, [&](const Partition& p) {
      BlockSizes sizes = p.block_sizes();
      double general = induced_eppf_general(model, two, sizes).value;
      double gibbs = induced_eppf_gibbs(model, two, sizes).value;
      auto it = oracle.find(p);
      double orc = it == oracle.end() ? 0.0 : it->second;
      require(std::abs(general - gibbs) <= 1e-10 && std::abs(general - orc) <= 1e-10,
              "induced methods disagree on a two-atom measure");
    });
  }
}

void check_sampler_agreement() {
  EppfModel model = EppfModel::pitman_yor(0.5, 1.0);
  BaseMeasure h = BaseMeasure::spike_slab(0.3);
  const int n = 4;
  const int paths = 20000;
  std::map<Partition, double> expected;
  for_each_partition(n, [&](const Partition& p) {
    expected[p] = induced_eppf_general(model, h, p.block_sizes()).value;
  });
  std::map<Partition, long> counts;
  for (int i = 0; i < paths; ++i) {
    TwoLevelSimulator sim(model, h, 424242, static_cast<std::uint64_t>(i));
    LabelSequence labels;
    for (int j = 0; j < n; ++j) labels.push_back(sim.step());
    ++counts[induced_partition(labels)];
  }
  double chi2 = 0.0;
  for (const auto& [p, prob] : expected) {
    double want = prob * paths;
    auto it = counts.find(p);
    double got = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    chi2 += (got - want) * (got - want) / want;
  }
  double limit = chi_square_quantile(static_cast<double>(expected.size()) - 1.0, 3.719016485);
  require(chi2 < limit, "sampler chi-square " + fmt(chi2) + " above " + fmt(limit));
}

void check_kr_constants() {
  require(std::abs(kr_limit_constant(0.5, 1) - 0.5) <= 1e-12, "c_1(0.5) != 1/2");
  require(std::abs(kr_limit_constant(0.5, 2) - 0.125) <= 1e-12, "c_2(0.5) != 1/8");
  for (double sigma : {0.25, 0.5, 0.75}) {
    double partial = 0.0;
    const int big_r = 100000;
    for (int r = 1; r <= big_r; ++r) partial += kr_limit_constant(sigma, r);
    double tail = std::exp(std::lgamma(static_cast<double>(big_r) + 1.0 - sigma) -
                           std::lgamma(1.0 - sigma) - log_factorial(big_r));
    require(std::abs(partial + tail - 1.0) <= 1e-9,
            "block-size constants with tail correction miss 1 by " + fmt(partial + tail - 1.0));
  }
}

void check_path_identities() {
  EppfModel model = EppfModel::pitman_yor(0.5, 1.0);
  BaseMeasure h = BaseMeasure::spike_slab(0.3);
  std::vector<long> cps = {1, 2, 10, 100, 1000, 20000};
  SamplePath a = simulate_path(model, h, cps, 8, 7, 0);
  SamplePath b = simulate_path(model, h, cps, 8, 7, 0);
  SamplePath c = simulate_path(model, h, cps, 8, 7, 1);
  require(a.checkpoints.size() == cps.size(), "missing checkpoints");
  for (size_t i = 0; i < cps.size(); ++i) {
    const CheckpointStats& st = a.checkpoints[i];
    require(st.n == cps[i], "checkpoint landed on the wrong n");
    require(st.merged_blocks == st.diffuse_blocks + st.atom_clusters,
            "cluster count identity violated");
    require(st.block_mass == st.n, "cluster mass identity violated");
    require(stats_equal(st, b.checkpoints[i]), "same seed produced different paths");
  }
  require(!stats_equal(a.checkpoints.back(), c.checkpoints.back()),
          "distinct path indexes produced identical paths");
}

void check_user_model(const EppfModel& model) {
  int n_top = std::min(6, model.n_cap());
  for (int n = 1; n <= n_top; ++n) {
    double total = 0.0;
    for_each_partition(n, [&](const Partition& p) { total += model.eppf(p.block_sizes()).value(); });
    require(std::abs(total - 1.0) <= 1e-8,
            "user model eppf normalization off by " + fmt(total - 1.0));
  }
  std::mt19937_64 rng = make_engine(99, 0);
  Partition p = model.sample_latent_partition(std::min(5, model.n_cap()), rng);
  require(p.n() == std::min(5, model.n_cap()), "user model sampling failed");
}

void check_user_base_measure(const BaseMeasure& h) {
  if (h.atom_mass() > 0.0) {
    double prev = -1.0;
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4, 1e6}) {
      double cur = static_cast<double>(h.alpha_of(x));
      require(cur >= prev, "alpha(x) is not monotone");
      prev = cur;
    }
  }
  if (h.atom_count() > 6) return;
  for (int k = 1; k <= 3; ++k) {
    double total = 0.0;
    for_each_partition(k, [&](const Partition& rho) {
      total += h_sharp(h, OccupancyVector::dishes(rho.block_sizes().sizes)).value;
    });
    double slack = static_cast<double>(k) * h.tail_mass() * (1 << k);
    require(std::abs(total - 1.0) <= 1e-10 + slack, "user measure dish law does not sum to 1");
  }
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt) {
  std::optional<EppfModel> user_model;
  std::optional<BaseMeasure> user_measure;
  if (opt.model_file) user_model = load_model(*opt.model_file, /*validate=*/false);
  if (opt.base_measure_file) user_measure = load_base_measure(*opt.base_measure_file);

  std::vector<std::pair<std::string, std::function<void()>>> checks = {
      {"partition_enumeration", check_partition_enumeration},
      {"eppf_identities", check_eppf_identities},
      {"eppf_normalization", check_eppf_normalization},
      {"v_table_recursion", [&] { check_v_table_recursion(user_model); }},
      {"stirling_identities", check_stirling_identities},
      {"dish_pattern_law", [&] { check_dish_pattern_law(user_measure); }},
      {"atom_sum_injection", check_atom_sum_injection},
      {"induced_normalization", check_induced_normalization},
      {"induced_method_agreement", check_induced_method_agreement},
      {"sampler_agreement", check_sampler_agreement},
      {"kr_constants", check_kr_constants},
      {"path_identities", check_path_identities},
  };
  if (user_model)
    checks.emplace_back("user_model", [&] { check_user_model(*user_model); });
  if (user_measure)
    checks.emplace_back("user_base_measure", [&] { check_user_base_measure(*user_measure); });

  std::vector<CheckResult> results;
  for (auto& [name, body] : checks) {
    CheckResult res;
    res.name = name;
    try {
      body();
      res.pass = true;
      res.detail = "ok";
    } catch (const Failure& f) {
      res.pass = false;
      res.detail = f.message;
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = e.what();
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace atompart
