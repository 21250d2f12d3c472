#pragma once

#include <span>
#include <vector>

#include "atompart/label.hpp"
#include "atompart/rng.hpp"

namespace atompart {

// Table counts per merged block: block i of the induced partition (size
// n_i) is the union of m_i latent tables, 1 <= m_i <= n_i.
struct OccupancyVector {
  std::vector<int> m;
  std::vector<int> n;

  OccupancyVector(std::vector<int> m_, std::vector<int> n_);
  // Dish-level view where each table is a singleton block (m == n).
  static OccupancyVector dishes(std::vector<int> m_);

  int k() const { return static_cast<int>(m.size()); }
  int total() const;                  // |m| = number of latent tables
  std::vector<int> m_star() const;    // entries >= 2, in place order
};

enum class AtomFamily { none, power_law, geometric };

// Base measure H = sum_i w_i delta_{x_i} + (1 - a) H^c with a = sum_i w_i.
// Closed-form families keep the first `truncation` weights exactly and
// record the remainder as tail mass; tail hits sample as diffuse draws and
// the tail bound is propagated into exact-computation error bounds.
class BaseMeasure {
 public:
  static BaseMeasure from_atoms(std::vector<double> weights);
  static BaseMeasure spike_slab(double a);
  static BaseMeasure power_law(double exponent, int truncation, double total_atom_mass);
  static BaseMeasure geometric(double ratio, int truncation, double total_atom_mass);

  int atom_count() const { return static_cast<int>(weights_.size()); }
  std::span<const double> atom_weights() const { return weights_; }
  double atom_weight(int index) const;  // 1-based

  double atom_mass() const { return nominal_mass_; }         // a
  double diffuse_mass() const { return 1.0 - nominal_mass_; }
  double tail_mass() const { return tail_; }

  AtomFamily family() const { return family_; }
  double family_param() const { return family_param_; }

  // One dish draw; consumes exactly two uniforms from state.dish so paths
  // with a common seed stay aligned across base measures.
  Label sample_dish(PathRng& state) const;

  // p_t = sum_j w_j^t over represented atoms, t = 0..t_max (p_0 = count).
  std::vector<double> power_sums(int t_max) const;

  // Karlin occupancy index alpha(x) = #{j : a_j >= 1/x} for the weights
  // normalized within the atomic support; closed-form for families.
  long alpha_of(double x) const;

 private:
  BaseMeasure() = default;
  std::vector<double> weights_;
  std::vector<double> cum_norm_;  // cumulative weights scaled to end at 1
  double nominal_mass_ = 0.0;
  double tail_ = 0.0;
  AtomFamily family_ = AtomFamily::none;
  double family_param_ = 0.0;
  void finish_init();
};

// Sum over pairwise-distinct atom indices j_1,...,j_{r+ell} of
// w_{j_1}^{m*_1} ... w_{j_r}^{m*_r} w_{j_{r+1}} ... w_{j_{r+ell}},
// computed by inclusion-exclusion over coincidence patterns.
double a_ml(const BaseMeasure& h, std::span<const int> m_star, int ell);

struct HSharpResult {
  double value;
  double error_bound;
};

// Probability that |m| i.i.d. dishes from H realize a fixed grouping into
// k blocks of sizes m_1,...,m_k (equal within, distinct across blocks).
HSharpResult h_sharp(const BaseMeasure& h, const OccupancyVector& m);

}  // namespace atompart
