#include "atompart/induced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace atompart {

namespace {

int env_cap_or(int fallback) {
  if (const char* env = std::getenv("ATOMPART_CAP_N")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return fallback;
}

constexpr int kGeneralCapDefault = 10;
constexpr int kOracleCapDefault = 7;

void partitions_rec(int n, int k, int max_part, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (k == 0) {
    if (n == 0) out.push_back(cur);
    return;
  }
  for (int p = std::min(max_part, n - k + 1); p >= 1; --p) {
    if (p * k < n) break;
    cur.push_back(p);
    partitions_rec(n - p, k - 1, p, cur, out);
    cur.pop_back();
  }
}

// n! / prod_j lambda_j! (j!)^lambda_j for one block's non-increasing parts:
// the number of set partitions of n elements with exactly these part sizes.
double block_split_count(const std::vector<int>& parts) {
  int n = 0;
  for (int p : parts) n += p;
  double lg = log_factorial(n);
  size_t i = 0;
  while (i < parts.size()) {
    size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    long mult = static_cast<long>(j - i);
    lg -= log_factorial(mult) + static_cast<double>(mult) * log_factorial(parts[i]);
    i = j;
  }
  return std::round(std::exp(lg));
}

}  // namespace

std::vector<int> BlockProfile::lambda(int i) const {
  const auto& p = parts.at(static_cast<size_t>(i));
  int mx = p.empty() ? 0 : p.front();
  std::vector<int> lam(static_cast<size_t>(mx), 0);
  for (int v : p) ++lam[static_cast<size_t>(v) - 1];
  return lam;
}

std::vector<int> BlockProfile::table_counts() const {
  std::vector<int> m;
  m.reserve(parts.size());
  for (const auto& p : parts) m.push_back(static_cast<int>(p.size()));
  return m;
}

std::vector<int> BlockProfile::realized_sizes() const {
  std::vector<int> s;
  for (const auto& p : parts) s.insert(s.end(), p.begin(), p.end());
  return s;
}

void for_each_occupancy(const BlockSizes& sizes,
                        const std::function<void(const OccupancyVector&)>& fn) {
  int k = sizes.k();
  if (k == 0) throw InvalidArgument("for_each_occupancy: empty block sizes");
  std::vector<int> m(static_cast<size_t>(k), 1);
  for (;;) {
    fn(OccupancyVector(m, sizes.sizes));
    int i = k - 1;
    while (i >= 0 && m[static_cast<size_t>(i)] == sizes.sizes[static_cast<size_t>(i)]) {
      m[static_cast<size_t>(i)] = 1;
      --i;
    }
    if (i < 0) break;
    ++m[static_cast<size_t>(i)];
  }
}

std::vector<std::vector<int>> partitions_into_parts(int n, int k) {
  if (n < 0 || k < 0) throw InvalidArgument("partitions_into_parts: negative argument");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions_rec(n, k, n, cur, out);
  return out;
}

void for_each_profile(const BlockSizes& sizes, const OccupancyVector& m,
                      const std::function<void(const BlockProfile&)>& fn) {
  int k = sizes.k();
  std::vector<std::vector<std::vector<int>>> choices(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    choices[static_cast<size_t>(i)] =
        partitions_into_parts(sizes.sizes[static_cast<size_t>(i)], m.m[static_cast<size_t>(i)]);
  BlockProfile prof;
  prof.parts.resize(static_cast<size_t>(k));
  std::vector<size_t> idx(static_cast<size_t>(k), 0);
  for (;;) {
    for (int i = 0; i < k; ++i)
      prof.parts[static_cast<size_t>(i)] = choices[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
    fn(prof);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] + 1 == choices[static_cast<size_t>(i)].size()) {
      idx[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
  }
}

double c_lambda(const BlockProfile& profile) {
  double total = 1.0;
  for (const auto& p : profile.parts) total *= block_split_count(p);
  return total;
}

LogReal q_tilde(const EppfModel& model, const BlockProfile& profile) {
  return model.eppf(profile.realized_sizes());
}

InducedProbability induced_eppf_general(const EppfModel& model, const BaseMeasure& h,
                                        const BlockSizes& sizes, int cap) {
  if (sizes.k() == 0) throw InvalidArgument("induced_eppf_general: empty block sizes");
  int n = sizes.n();
  if (n > cap)
    throw ResourceLimit("induced_eppf_general: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  LogReal total = LogReal::zero();
  double err = 0.0;
  for_each_occupancy(sizes, [&](const OccupancyVector& m) {
    HSharpResult hs = h_sharp(h, m);
    if (hs.value == 0.0 && hs.error_bound == 0.0) return;
    LogReal inner = LogReal::zero();
    for_each_profile(sizes, m, [&](const BlockProfile& prof) {
      inner += LogReal::from_value(c_lambda(prof)) * q_tilde(model, prof);
    });
    total += LogReal::from_value(hs.value) * inner;
    err += hs.error_bound * inner.value();
  });
  return {total.value(), err};
}

InducedProbability induced_eppf_general(const EppfModel& model, const BaseMeasure& h,
                                        const BlockSizes& sizes) {
  return induced_eppf_general(model, h, sizes, env_cap_or(kGeneralCapDefault));
}

InducedProbability induced_eppf_gibbs(const EppfModel& model, const BaseMeasure& h,
                                      const BlockSizes& sizes) {
  if (!model.has_sigma())
    throw InvalidArgument("induced_eppf_gibbs: model is not of Gibbs type");
  if (sizes.k() == 0) throw InvalidArgument("induced_eppf_gibbs: empty block sizes");
  int n = sizes.n();
  int cap = env_cap_or(kGeneralCapDefault);
  if (n > cap)
    throw ResourceLimit("induced_eppf_gibbs: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  double sigma = model.sigma();
  std::optional<VTable> built;
  const VTable* vt = model.v_table();
  if (!vt) {
    built.emplace(VTable::pitman_yor(sigma, model.theta(), n));
    vt = &*built;
  }
  if (n > vt->n_max())
    throw ResourceLimit("induced_eppf_gibbs: n exceeds the V-table height");
  StirlingTable st(sigma, *std::max_element(sizes.sizes.begin(), sizes.sizes.end()));
  LogReal total = LogReal::zero();
  double err = 0.0;
  for_each_occupancy(sizes, [&](const OccupancyVector& m) {
    HSharpResult hs = h_sharp(h, m);
    if (hs.value == 0.0 && hs.error_bound == 0.0) return;
    LogReal prod = vt->v(n, m.total());
    for (int i = 0; i < m.k(); ++i)
      prod *= st.s(sizes.sizes[static_cast<size_t>(i)], m.m[static_cast<size_t>(i)]);
    total += LogReal::from_value(hs.value) * prod;
    err += hs.error_bound * prod.value();
  });
  return {total.value(), err};
}

InducedProbability induced_eppf_spike_slab(const EppfModel& model, double a,
                                           const BlockSizes& sizes) {
  if (!(a >= 0.0 && a <= 1.0))
    throw InvalidArgument("induced_eppf_spike_slab: a must be in [0,1]");
  if (sizes.k() == 0) throw InvalidArgument("induced_eppf_spike_slab: empty block sizes");
  int n = sizes.n();
  int k = sizes.k();
  LogReal total = LogReal::from_value(std::pow(1.0 - a, k)) * model.eppf(sizes);
  if (a > 0.0) {
    double base = std::pow(1.0 - a, k - 1);
    if (model.has_sigma()) {
      double sigma = model.sigma();
      std::optional<VTable> built;
      const VTable* vt = model.v_table();
      if (!vt) {
        built.emplace(VTable::pitman_yor(sigma, model.theta(), n));
        vt = &*built;
      }
      if (n > vt->n_max())
        throw ResourceLimit("induced_eppf_spike_slab: n exceeds the V-table height");
      StirlingTable st(sigma, *std::max_element(sizes.sizes.begin(), sizes.sizes.end()));
      double rising_all = 0.0;
      for (int s : sizes.sizes) rising_all += log_rising(1.0 - sigma, s - 1);
      for (int i = 0; i < k; ++i) {
        int ni = sizes.sizes[static_cast<size_t>(i)];
        double rising_rest = rising_all - log_rising(1.0 - sigma, ni - 1);
        for (int r = 1; r <= ni; ++r) {
          LogReal term = LogReal::from_log(rising_rest) * vt->v(n, k - 1 + r) * st.s(ni, r);
          total += LogReal::from_value(base * std::pow(a, r)) * term;
        }
      }
    } else {
      for (int i = 0; i < k; ++i) {
        int ni = sizes.sizes[static_cast<size_t>(i)];
        BlockSizes rest = sizes.without(i);
        for (int r = 1; r <= ni; ++r) {
          LogReal term = LogReal::zero();
          for (const auto& parts : partitions_into_parts(ni, r)) {
            std::vector<int> realized = rest.sizes;
            realized.insert(realized.end(), parts.begin(), parts.end());
            term += LogReal::from_value(block_split_count(parts)) * model.eppf(realized);
          }
          total += LogReal::from_value(base * std::pow(a, r)) * term;
        }
      }
    }
  }
  return {total.value(), 0.0};
}

double joint_atom_probability(const EppfModel& model, const BaseMeasure& h,
                              std::span<const int> atom_labels) {
  int n = static_cast<int>(atom_labels.size());
  if (n == 0) throw InvalidArgument("joint_atom_probability: empty label list");
  int cap = env_cap_or(kGeneralCapDefault);
  if (n > cap)
    throw ResourceLimit("joint_atom_probability: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  for (int v : atom_labels)
    if (v < 1 || v > h.atom_count())
      throw InvalidArgument("joint_atom_probability: atom label out of range");
  LogReal total = LogReal::zero();
  for_each_partition(n, [&](const Partition& p) {
    LogReal w = LogReal::one();
    for (const auto& block : p.blocks()) {
      int lab = atom_labels[static_cast<size_t>(block.front()) - 1];
      for (int e : block)
        if (atom_labels[static_cast<size_t>(e) - 1] != lab) return;
      w *= LogReal::from_value(h.atom_weight(lab));
    }
    total += w * model.eppf(p.block_sizes());
  }, cap);
  return total.value();
}

std::map<Partition, double> oracle_induced_law(const EppfModel& model, const BaseMeasure& h,
                                               int n, int cap) {
  if (n < 1) throw InvalidArgument("oracle_induced_law: n must be >= 1");
  if (n > cap)
    throw ResourceLimit("oracle_induced_law: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  int atoms = h.atom_count();
  // Tail (for truncated families) counts as diffuse, matching the sampler.
  double fresh_w = h.diffuse_mass() + h.tail_mass();
  std::map<Partition, LogReal> law;
  for_each_partition(n, [&](const Partition& latent) {
    LogReal q = model.eppf(latent.block_sizes());
    if (q.is_zero()) return;
    int b = latent.block_count();
    std::vector<int> dish(static_cast<size_t>(b), 0);  // 0 = fresh, else atom index
    std::vector<int> assign = latent.assignments();
    for (;;) {
      LogReal w = q;
      for (int j = 0; j < b; ++j)
        w *= LogReal::from_value(dish[static_cast<size_t>(j)] == 0
                                     ? fresh_w
                                     : h.atom_weight(dish[static_cast<size_t>(j)]));
      if (!w.is_zero()) {
        LabelSequence labels;
        labels.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          int j = assign[static_cast<size_t>(i)];
          labels.push_back(dish[static_cast<size_t>(j)] == 0
                               ? Label::fresh(static_cast<std::uint64_t>(j))
                               : Label::atom(dish[static_cast<size_t>(j)]));
        }
        law[induced_partition(labels)] += w;
      }
      int j = b - 1;
      while (j >= 0 && dish[static_cast<size_t>(j)] == atoms) {
        dish[static_cast<size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
      ++dish[static_cast<size_t>(j)];
    }
  }, cap);
  std::map<Partition, double> out;
  for (const auto& [p, v] : law) out.emplace(p, v.value());
  return out;
}

std::map<Partition, double> oracle_induced_law(const EppfModel& model, const BaseMeasure& h,
                                               int n) {
  return oracle_induced_law(model, h, n, env_cap_or(kOracleCapDefault));
}

InducedProbability oracle_induced_eppf(const EppfModel& model, const BaseMeasure& h,
                                       const Partition& target) {
  auto law = oracle_induced_law(model, h, target.n());
  auto it = law.find(target);
  double err = static_cast<double>(target.n()) * h.tail_mass();
  return {it == law.end() ? 0.0 : it->second, err};
}

}  // namespace atompart
