#include "atompart/base_measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atompart/logreal.hpp"
#include "atompart/partition.hpp"

namespace atompart {

namespace {

constexpr int kPatternCap = 13;  // Bell(13) ~ 2.8e7, the practical ceiling here

double exact_binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace

OccupancyVector::OccupancyVector(std::vector<int> m_, std::vector<int> n_)
    : m(std::move(m_)), n(std::move(n_)) {
  if (m.size() != n.size()) throw InvalidArgument("OccupancyVector: m and n differ in length");
  if (m.empty()) throw InvalidArgument("OccupancyVector: empty");
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] < 1 || m[i] > n[i])
      throw InvalidArgument("OccupancyVector: requires 1 <= m_i <= n_i");
}

OccupancyVector OccupancyVector::dishes(std::vector<int> m_) {
  std::vector<int> n_ = m_;
  return OccupancyVector(std::move(m_), std::move(n_));
}

int OccupancyVector::total() const {
  int t = 0;
  for (int v : m) t += v;
  return t;
}

std::vector<int> OccupancyVector::m_star() const {
  std::vector<int> s;
  for (int v : m)
    if (v >= 2) s.push_back(v);
  return s;
}

void BaseMeasure::finish_init() {
  cum_norm_.clear();
  double repr = nominal_mass_ - tail_;
  if (!weights_.empty()) {
    cum_norm_.reserve(weights_.size());
    double acc = 0.0;
    for (double w : weights_) {
      acc += w;
      cum_norm_.push_back(acc / repr);
    }
    cum_norm_.back() = 1.0;
  }
}

BaseMeasure BaseMeasure::from_atoms(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidArgument("BaseMeasure: atom weights must be positive");
    sum += w;
  }
  if (sum > 1.0 + 1e-12) throw InvalidArgument("BaseMeasure: atom weights sum to more than 1");
  BaseMeasure h;
  h.weights_ = std::move(weights);
  h.nominal_mass_ = std::min(sum, 1.0);
  h.finish_init();
  return h;
}

BaseMeasure BaseMeasure::spike_slab(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("BaseMeasure: a must be in [0,1]");
  if (a == 0.0) return from_atoms({});
  return from_atoms({a});
}

BaseMeasure BaseMeasure::power_law(double exponent, int truncation, double total_atom_mass) {
  if (!(exponent > 1.0)) throw InvalidArgument("BaseMeasure: power_law exponent must be > 1");
  if (truncation < 1) throw InvalidArgument("BaseMeasure: truncation must be >= 1");
  if (!(total_atom_mass > 0.0 && total_atom_mass <= 1.0))
    throw InvalidArgument("BaseMeasure: total_atom_mass must be in (0,1]");
  double z = std::riemann_zeta(exponent);
  BaseMeasure h;
  h.weights_.reserve(static_cast<size_t>(truncation));
  double partial = 0.0;
  for (int j = 1; j <= truncation; ++j) {
    double w = total_atom_mass * std::pow(static_cast<double>(j), -exponent) / z;
    h.weights_.push_back(w);
    partial += w;
  }
  h.nominal_mass_ = total_atom_mass;
  h.tail_ = std::max(0.0, total_atom_mass - partial);
  h.family_ = AtomFamily::power_law;
  h.family_param_ = exponent;
  h.finish_init();
  return h;
}

BaseMeasure BaseMeasure::geometric(double ratio, int truncation, double total_atom_mass) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("BaseMeasure: ratio must be in (0,1)");
  if (truncation < 1) throw InvalidArgument("BaseMeasure: truncation must be >= 1");
  if (!(total_atom_mass > 0.0 && total_atom_mass <= 1.0))
    throw InvalidArgument("BaseMeasure: total_atom_mass must be in (0,1]");
  BaseMeasure h;
  h.weights_.reserve(static_cast<size_t>(truncation));
  for (int j = 1; j <= truncation; ++j)
    h.weights_.push_back(total_atom_mass * (1.0 - ratio) * std::pow(ratio, j - 1));
  h.nominal_mass_ = total_atom_mass;
  h.tail_ = total_atom_mass * std::pow(ratio, truncation);
  h.family_ = AtomFamily::geometric;
  h.family_param_ = ratio;
  h.finish_init();
  return h;
}

double BaseMeasure::atom_weight(int index) const {
  if (index < 1 || index > atom_count()) throw InvalidArgument("BaseMeasure: atom index out of range");
  return weights_[static_cast<size_t>(index) - 1];
}

Label BaseMeasure::sample_dish(PathRng& state) const {
  double u = next_unit(state.dish);
  double v = next_unit(state.dish);
  double repr = nominal_mass_ - tail_;
  if (u < repr) {
    size_t idx = static_cast<size_t>(
        std::upper_bound(cum_norm_.begin(), cum_norm_.end(), v) - cum_norm_.begin());
    if (idx >= cum_norm_.size()) idx = cum_norm_.size() - 1;
    return Label::atom(static_cast<int>(idx) + 1);
  }
  return Label::fresh(state.fresh_counter++);
}

std::vector<double> BaseMeasure::power_sums(int t_max) const {
  if (t_max < 0) throw InvalidArgument("power_sums: negative order");
  std::vector<double> p(static_cast<size_t>(t_max) + 1, 0.0);
  p[0] = static_cast<double>(atom_count());
  for (double w : weights_) {
    double cur = 1.0;
    for (int t = 1; t <= t_max; ++t) {
      cur *= w;
      p[static_cast<size_t>(t)] += cur;
    }
  }
  return p;
}

long BaseMeasure::alpha_of(double x) const {
  if (!(x > 0.0)) throw InvalidArgument("alpha_of: requires x > 0");
  if (nominal_mass_ == 0.0) throw InvalidState("alpha_of: base measure has no atomic part");
  switch (family_) {
    case AtomFamily::power_law: {
      // normalized weights a_j = j^{-s} / zeta(s); a_j >= 1/x iff j <= (x/zeta)^{1/s}
      double s = family_param_;
      double z = std::riemann_zeta(s);
      double b = std::pow(x / z, 1.0 / s);
      return b < 1.0 ? 0 : static_cast<long>(std::floor(b));
    }
    case AtomFamily::geometric: {
      // a_j = (1-rho) rho^{j-1} >= 1/x iff j - 1 <= log(x(1-rho)) / log(1/rho)
      double rho = family_param_;
      double t = x * (1.0 - rho);
      if (t < 1.0) return 0;
      return 1 + static_cast<long>(std::floor(std::log(t) / std::log(1.0 / rho)));
    }
    case AtomFamily::none: {
      long c = 0;
      for (double w : weights_)
        if (w * x >= nominal_mass_) ++c;
      return c;
    }
  }
  throw InvalidState("alpha_of: unreachable");
}

double a_ml(const BaseMeasure& h, std::span<const int> m_star, int ell) {
  if (ell < 0) throw InvalidArgument("a_ml: ell must be >= 0");
  for (int e : m_star)
    if (e < 2) throw InvalidArgument("a_ml: m_star entries must be >= 2");
  int r = static_cast<int>(m_star.size());
  int t = r + ell;
  if (t == 0) return 1.0;
  if (t > h.atom_count()) return 0.0;
  if (t > kPatternCap) throw ResourceLimit("a_ml: too many distinct-index factors");

  std::vector<int> e(static_cast<size_t>(t), 1);
  int e_total = ell;
  for (int i = 0; i < r; ++i) {
    e[static_cast<size_t>(i)] = m_star[static_cast<size_t>(i)];
    e_total += m_star[static_cast<size_t>(i)];
  }
  std::vector<double> p = h.power_sums(e_total);

  // Sum over injective index tuples = sum over coincidence patterns rho of
  // prod_B (-1)^{|B|-1} (|B|-1)! p_{sum of exponents in B}.
  double total = 0.0;
  for_each_partition(t, [&](const Partition& rho) {
    double term = 1.0;
    for (const auto& block : rho.blocks()) {
      int esum = 0;
      for (int pos : block) esum += e[static_cast<size_t>(pos) - 1];
      double f = p[static_cast<size_t>(esum)];
      for (size_t i = 1; i < block.size(); ++i) f *= -static_cast<double>(i);
      term *= f;
    }
    total += term;
  }, kPatternCap);
  if (total < 0.0) {
    if (total < -1e-12) throw InvalidState("a_ml: inclusion-exclusion went negative");
    total = 0.0;
  }
  return total;
}

HSharpResult h_sharp(const BaseMeasure& h, const OccupancyVector& m) {
  int k = m.k();
  std::vector<int> ms = m.m_star();
  int r = static_cast<int>(ms.size());
  double one_minus_a = h.diffuse_mass();
  double value = 0.0;
  double err = 0.0;
  for (int ell = 0; ell <= k - r; ++ell) {
    double factor = std::pow(one_minus_a, k - ell - r) * exact_binomial(k - r, ell);
    value += factor * a_ml(h, ms, ell);
    err += factor * static_cast<double>(r + ell) * h.tail_mass();
  }
  value = std::clamp(value, 0.0, 1.0);
  return {value, err};
}

}  // namespace atompart
