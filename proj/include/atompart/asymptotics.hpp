#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "atompart/base_measure.hpp"
#include "atompart/eppf.hpp"

namespace atompart {

struct CheckpointStats {
  long n = 0;
  long latent_blocks = 0;   // K_n
  long diffuse_blocks = 0;  // N_n: tables whose dish came from the diffuse part
  long atom_clusters = 0;   // Lambda_n: distinct atoms hit so far
  long merged_blocks = 0;   // |induced partition|
  long block_mass = 0;      // total size of merged clusters (== n on a correct path)
  std::vector<long> small_counts;  // induced blocks of size r, r = 1..r_max
};

struct SamplePath {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<CheckpointStats> checkpoints;
};

// Scaling c_n with K_n/c_n convergent: 1 for sigma < 0, log n for
// sigma = 0, n^sigma for 0 < sigma < 1.
class Normalizer {
 public:
  enum class Kind { constant, log_n, power };
  static Normalizer constant() { return Normalizer(Kind::constant, 0.0); }
  static Normalizer log_n() { return Normalizer(Kind::log_n, 0.0); }
  static Normalizer power(double sigma);

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  double operator()(double n) const;

 private:
  Normalizer(Kind k, double e) : kind_(k), exponent_(e) {}
  Kind kind_;
  double exponent_;
};

Normalizer gibbs_normalizer(double sigma);

// Slowly varying part of the occupancy index alpha(x) ~ x^{sigma0} ell0(x).
struct SlowlyVarying {
  enum class Kind { constant, log_geometric };
  Kind kind = Kind::constant;
  double constant = 1.0;
  double rho = 0.0;  // log_geometric: 1 + log(a x (1-rho)) / log(1/rho)
  double a = 1.0;
  double operator()(double x) const;
};

// Growth regime of the number of distinct atoms discovered by dish draws.
// finite_support means an explicit atom list: the atom-cluster count
// saturates at the atom count instead of varying regularly, and the
// remaining fields are unset.
struct KarlinRegime {
  bool finite_support = false;
  double sigma0 = 0.0;
  SlowlyVarying ell0;
  double z0 = 0.0;
};

KarlinRegime karlin_regime(const BaseMeasure& h);

// Limiting fraction of blocks of size r among all blocks, 0 < sigma < 1:
// sigma Gamma(r - sigma) / (Gamma(1 - sigma) r!).
double kr_limit_constant(double sigma, int r);

// Sequential seating under the model's predictive law. O(1) per customer
// for Pitman-Yor and tabulated Gibbs models via the decomposition
// n_j - sigma = (n_j - 1) + (1 - sigma); generic (and slow) for custom
// models. The model must outlive the sampler.
class LatentCrpSampler {
 public:
  explicit LatentCrpSampler(const EppfModel& model);

  // Seats the next customer and returns its 0-based table; a value equal
  // to the table count before the call means a new table was opened.
  int step(std::mt19937_64& rng);

  long customers() const { return n_; }
  int tables() const { return k_; }
  long table_size(int t) const { return sizes_.at(static_cast<size_t>(t)); }

 private:
  const EppfModel* model_;
  long n_ = 0;
  int k_ = 0;
  std::vector<long> sizes_;
  std::vector<std::int32_t> join_events_;  // table joined by each non-founder
  BlockSizes generic_sizes_;               // custom models only
};

// Two-level restaurant: latent seating plus one dish draw per new table.
// Dishes and seating use separate streams of the path RNG.
class TwoLevelSimulator {
 public:
  TwoLevelSimulator(const EppfModel& model, const BaseMeasure& h, std::uint64_t seed,
                    std::uint64_t path_index);

  Label step();  // seats customer n+1, returns its dish label
  long customers() const { return crp_.customers(); }
  CheckpointStats checkpoint(int r_max) const;

 private:
  LatentCrpSampler crp_;
  const BaseMeasure* h_;
  PathRng rng_;
  std::vector<Label> table_dish_;
  std::unordered_map<std::int64_t, long> cluster_size_;
  std::vector<char> atom_seen_;
  long diffuse_blocks_ = 0;
  long atom_clusters_ = 0;
};

long simulate_path_cap();  // 10^6 customers (10^3 for custom models)

SamplePath simulate_path(const EppfModel& model, const BaseMeasure& h,
                         std::span<const long> checkpoints, int r_max, std::uint64_t seed,
                         std::uint64_t path_index);

struct StatisticSpec {
  std::string name;  // merged_ratio | loglog_slope | kr_fraction | latent_over_cn | saturation
  int r = 1;         // kr_fraction only
  std::optional<double> target;  // default derived from model and base measure
  double tolerance = 0.05;
};

struct ExperimentConfig {
  EppfModel model = EppfModel::pitman_yor(0.5, 1.0);
  BaseMeasure base = BaseMeasure::spike_slab(0.0);
  std::vector<long> checkpoints;
  int r_max = 8;
  int replicates = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<StatisticSpec> statistics;
};

struct StatisticResult {
  std::string name;
  int r = 1;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::vector<SamplePath> paths;
  std::vector<StatisticResult> statistics;
};

// Runs `replicates` independent paths (thread-parallel, deterministic in
// (seed, replicate index)) and evaluates the requested statistics.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace atompart
