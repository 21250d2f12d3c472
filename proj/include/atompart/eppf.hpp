#pragma once

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "atompart/logreal.hpp"
#include "atompart/partition.hpp"

namespace atompart {

// Gibbs-type weights V_{n,k}, 1 <= k <= n <= n_max, stored in log space.
// Validity means V_{1,1} = 1 and the backward recursion
//   V_{n,k} = (n - sigma k) V_{n+1,k} + V_{n+1,k+1}
// holds to relative tolerance; validation is explicit (not run on
// construction) so diagnostic tools can inspect bad tables.
class VTable {
 public:
  VTable(double sigma, int n_max, std::vector<double> log_v);
  static VTable pitman_yor(double sigma, double theta, int n_max);

  double sigma() const { return sigma_; }
  int n_max() const { return n_max_; }
  LogReal v(int n, int k) const;
  double log_v(int n, int k) const;

  // Throws InvalidModel naming the first failing (n,k).
  void validate(double rel_tol = 1e-10) const;

 private:
  double sigma_;
  int n_max_;
  std::vector<double> log_v_;  // row n starts at n(n-1)/2
};

// Generalized factorial coefficients S_sigma(n,k) (nonnegative for
// sigma < 1), filled by S(n+1,k) = S(n,k-1) + (n - sigma k) S(n,k).
class StirlingTable {
 public:
  StirlingTable(double sigma, int n_max);

  double sigma() const { return sigma_; }
  int n_max() const { return n_max_; }
  LogReal s(int n, int k) const;

 private:
  double sigma_;
  int n_max_;
  std::vector<double> log_s_;  // row n at n(n+1)/2, entries k = 0..n
};

LogReal stirling_sigma(double sigma, int n, int k);

// Builds the Pitman-Yor V-table V_{n,k} = prod_{i<k}(theta+i sigma) / (theta+1)_{n-1}.
VTable py_v_table(double sigma, double theta, int n_max);

// Exchangeable partition probability function of the latent partition.
// Evaluation takes unordered block sizes; the empty composition has mass 1.
class EppfModel {
 public:
  enum class Kind { pitman_yor, gibbs, custom };

  // Custom models supply log q (>= -inf); they are trusted for evaluation
  // and used through generic predictive ratios elsewhere.
  using LogEvaluator = std::function<double(std::span<const int>)>;

  static EppfModel pitman_yor(double sigma, double theta);
  static EppfModel gibbs(double sigma, VTable table);
  static EppfModel custom(LogEvaluator log_q);

  Kind kind() const { return kind_; }
  bool has_sigma() const { return kind_ != Kind::custom; }
  double sigma() const;
  double theta() const;
  const VTable* v_table() const { return v_ ? v_.get() : nullptr; }
  // Largest supported n for evaluation (V-table height for Gibbs models).
  int n_cap() const;
  // Hard ceiling on the number of blocks (finite only for sigma < 0).
  int max_blocks() const;

  LogReal eppf(std::span<const int> sizes) const;
  LogReal eppf(const BlockSizes& sizes) const;

  // P(next element joins block i), plus the new-block mass in the last
  // entry. Computed from EPPF ratios, so it works for any model kind.
  std::vector<double> predictive_weights(const BlockSizes& sizes) const;

  // Sequential predictive sampling of a partition of {1,...,n}.
  Partition sample_latent_partition(int n, std::mt19937_64& rng) const;

 private:
  EppfModel() = default;
  Kind kind_ = Kind::custom;
  double sigma_ = 0.0;
  double theta_ = 0.0;
  int py_max_blocks_ = 0;  // sigma < 0 only
  std::shared_ptr<const VTable> v_;
  LogEvaluator custom_;
};

}  // namespace atompart
