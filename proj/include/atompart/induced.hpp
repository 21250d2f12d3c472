#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "atompart/base_measure.hpp"
#include "atompart/eppf.hpp"
#include "atompart/partition.hpp"

namespace atompart {

// A way block i of the induced partition (size n_i) can split into m_i
// latent tables: parts[i] lists the table sizes, non-increasing.
struct BlockProfile {
  std::vector<std::vector<int>> parts;

  // Multiplicity encoding: lambda(i)[j-1] = number of tables of size j
  // inside block i.
  std::vector<int> lambda(int i) const;
  std::vector<int> table_counts() const;   // m_i = parts[i].size()
  std::vector<int> realized_sizes() const; // all table sizes concatenated
};

struct InducedProbability {
  double value;
  double error_bound;
};

// All occupancy vectors m with 1 <= m_i <= n_i.
void for_each_occupancy(const BlockSizes& sizes,
                        const std::function<void(const OccupancyVector&)>& fn);

// Integer partitions of n into exactly k parts, each non-increasing.
std::vector<std::vector<int>> partitions_into_parts(int n, int k);

// All block profiles consistent with (sizes, m).
void for_each_profile(const BlockSizes& sizes, const OccupancyVector& m,
                      const std::function<void(const BlockProfile&)>& fn);

// Number of ways to realize the profile as an actual set partition of the
// block elements: prod_i n_i! / prod_j lambda_ij! (j!)^lambda_ij.
double c_lambda(const BlockProfile& profile);

// EPPF evaluated at any realization of the profile (well defined by
// symmetry of the EPPF).
LogReal q_tilde(const EppfModel& model, const BlockProfile& profile);

// Probability that the induced partition equals a partition with the given
// appearance-ordered block sizes, by the full occupancy/profile sum.
InducedProbability induced_eppf_general(const EppfModel& model, const BaseMeasure& h,
                                        const BlockSizes& sizes);
InducedProbability induced_eppf_general(const EppfModel& model, const BaseMeasure& h,
                                        const BlockSizes& sizes, int cap);

// Gibbs-type shortcut: sum over m of H#(m) V_{n,|m|} prod_i S_sigma(n_i,m_i).
InducedProbability induced_eppf_gibbs(const EppfModel& model, const BaseMeasure& h,
                                      const BlockSizes& sizes);

// Single-atom (spike and slab) closed form for H = a delta_x + (1-a) H_c.
InducedProbability induced_eppf_spike_slab(const EppfModel& model, double a,
                                           const BlockSizes& sizes);

// P(xi_1,...,xi_n hit the given atoms exactly): joint law of the first n
// observations falling on prescribed atom labels.
double joint_atom_probability(const EppfModel& model, const BaseMeasure& h,
                              std::span<const int> atom_labels);

// Brute-force law of the induced partition: enumerate latent partitions
// and per-block dish assignments. Exact for atom lists (zero tail).
std::map<Partition, double> oracle_induced_law(const EppfModel& model, const BaseMeasure& h,
                                               int n);
std::map<Partition, double> oracle_induced_law(const EppfModel& model, const BaseMeasure& h,
                                               int n, int cap);
InducedProbability oracle_induced_eppf(const EppfModel& model, const BaseMeasure& h,
                                       const Partition& target);

}  // namespace atompart
