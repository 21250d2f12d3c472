#include "atompart/eppf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "atompart/rng.hpp"

namespace atompart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kStirlingCap = 4096;

// For sigma < 0 the Pitman-Yor domain requires theta = |sigma| m with m a
// positive integer; returns m, or 0 if the pair is invalid.
int py_negative_sigma_m(double sigma, double theta) {
  double m = theta / (-sigma);
  double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(m))) return 0;
  return static_cast<int>(r);
}

void check_py_params(double sigma, double theta) {
  if (std::isnan(sigma) || std::isnan(theta))
    throw InvalidModel("pitman_yor: NaN parameter");
  if (sigma >= 1.0) throw InvalidModel("pitman_yor: sigma must be < 1");
  if (sigma < 0.0) {
    if (py_negative_sigma_m(sigma, theta) == 0)
      throw InvalidModel("pitman_yor: sigma < 0 requires theta = |sigma| m, m a positive integer");
  } else if (theta <= -sigma) {
    throw InvalidModel("pitman_yor: requires theta > -sigma");
  }
}

}  // namespace

VTable::VTable(double sigma, int n_max, std::vector<double> log_v)
    : sigma_(sigma), n_max_(n_max), log_v_(std::move(log_v)) {
  if (sigma_ >= 1.0) throw InvalidModel("VTable: sigma must be < 1");
  if (n_max_ < 1) throw InvalidArgument("VTable: n_max must be >= 1");
  size_t want = static_cast<size_t>(n_max_) * (static_cast<size_t>(n_max_) + 1) / 2;
  if (log_v_.size() != want) throw InvalidArgument("VTable: wrong number of entries");
}

double VTable::log_v(int n, int k) const {
  if (n < 1 || n > n_max_ || k < 1 || k > n) throw InvalidArgument("VTable: (n,k) out of range");
  return log_v_[static_cast<size_t>(n) * (static_cast<size_t>(n) - 1) / 2 +
                static_cast<size_t>(k) - 1];
}

LogReal VTable::v(int n, int k) const { return LogReal::from_log(log_v(n, k)); }

VTable VTable::pitman_yor(double sigma, double theta, int n_max) {
  check_py_params(sigma, theta);
  if (n_max < 1) throw InvalidArgument("VTable: n_max must be >= 1");
  int m = sigma < 0.0 ? py_negative_sigma_m(sigma, theta) : 0;
  // prefix[k] = log prod_{i=1}^{k} (theta + i sigma)
  std::vector<double> prefix(static_cast<size_t>(n_max), 0.0);
  for (int i = 1; i < n_max; ++i) {
    double f = theta + static_cast<double>(i) * sigma;
    if (sigma < 0.0 && i >= m) f = 0.0;
    prefix[static_cast<size_t>(i)] =
        f <= 0.0 ? -kInf : prefix[static_cast<size_t>(i) - 1] + std::log(f);
  }
  std::vector<double> log_v;
  log_v.reserve(static_cast<size_t>(n_max) * (static_cast<size_t>(n_max) + 1) / 2);
  for (int n = 1; n <= n_max; ++n) {
    double denom = log_rising(theta + 1.0, n - 1);
    for (int k = 1; k <= n; ++k) log_v.push_back(prefix[static_cast<size_t>(k) - 1] - denom);
  }
  return VTable(sigma, n_max, std::move(log_v));
}

void VTable::validate(double rel_tol) const {
  if (std::abs(log_v(1, 1)) > rel_tol)
    throw InvalidModel("VTable: V(1,1) != 1");
  for (int n = 1; n < n_max_; ++n) {
    for (int k = 1; k <= n; ++k) {
      double target = log_v(n, k);
      double t1 = std::log(static_cast<double>(n) - sigma_ * static_cast<double>(k)) +
                  log_v(n + 1, k);
      double t2 = log_v(n + 1, k + 1);
      if (std::isinf(target) && target < 0) {
        if (!(std::isinf(t1) && std::isinf(t2)))
          throw InvalidModel("VTable: recursion fails at n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + " (zero entry with nonzero successors)");
        continue;
      }
      double resid = std::exp(t1 - target) + std::exp(t2 - target) - 1.0;
      if (!(std::abs(resid) <= rel_tol))
        throw InvalidModel("VTable: recursion residual " + std::to_string(resid) + " at n=" +
                           std::to_string(n) + ", k=" + std::to_string(k));
    }
  }
}

VTable py_v_table(double sigma, double theta, int n_max) {
  return VTable::pitman_yor(sigma, theta, n_max);
}

StirlingTable::StirlingTable(double sigma, int n_max) : sigma_(sigma), n_max_(n_max) {
  if (sigma_ >= 1.0) throw InvalidArgument("StirlingTable: requires sigma < 1");
  if (n_max_ < 0) throw InvalidArgument("StirlingTable: n_max must be >= 0");
  if (n_max_ > kStirlingCap) throw ResourceLimit("StirlingTable: n_max exceeds cap");
  size_t rows = static_cast<size_t>(n_max_) + 1;
  log_s_.assign(rows * (rows + 1) / 2, -kInf);
  auto at = [this](int n, int k) -> double& {
    return log_s_[static_cast<size_t>(n) * (static_cast<size_t>(n) + 1) / 2 +
                  static_cast<size_t>(k)];
  };
  at(0, 0) = 0.0;
  for (int n = 0; n < n_max_; ++n) {
    for (int k = 1; k <= n + 1; ++k) {
      LogReal val = LogReal::from_log(at(n, k - 1));
      if (k <= n) {
        double f = static_cast<double>(n) - sigma_ * static_cast<double>(k);
        val += LogReal::from_log(std::log(f) + at(n, k));
      }
      at(n + 1, k) = val.log();
    }
  }
}

LogReal StirlingTable::s(int n, int k) const {
  if (n < 0 || k < 0) throw InvalidArgument("StirlingTable: negative index");
  if (n > n_max_) throw InvalidArgument("StirlingTable: n out of range");
  if (k > n) return LogReal::zero();
  return LogReal::from_log(log_s_[static_cast<size_t>(n) * (static_cast<size_t>(n) + 1) / 2 +
                                  static_cast<size_t>(k)]);
}

LogReal stirling_sigma(double sigma, int n, int k) {
  if (n < 0 || k < 0) throw InvalidArgument("stirling_sigma: negative index");
  if (k > n) return LogReal::zero();
  return StirlingTable(sigma, n).s(n, k);
}

EppfModel EppfModel::pitman_yor(double sigma, double theta) {
  check_py_params(sigma, theta);
  EppfModel m;
  m.kind_ = Kind::pitman_yor;
  m.sigma_ = sigma;
  m.theta_ = theta;
  m.py_max_blocks_ = sigma < 0.0 ? py_negative_sigma_m(sigma, theta) : 0;
  return m;
}

EppfModel EppfModel::gibbs(double sigma, VTable table) {
  if (sigma != table.sigma())
    throw InvalidModel("gibbs: sigma does not match the V-table");
  EppfModel m;
  m.kind_ = Kind::gibbs;
  m.sigma_ = sigma;
  m.v_ = std::make_shared<const VTable>(std::move(table));
  return m;
}

EppfModel EppfModel::custom(LogEvaluator log_q) {
  if (!log_q) throw InvalidModel("custom: null evaluator");
  EppfModel m;
  m.kind_ = Kind::custom;
  m.custom_ = std::move(log_q);
  return m;
}

double EppfModel::sigma() const {
  if (!has_sigma()) throw InvalidState("EppfModel: custom models have no sigma");
  return sigma_;
}

double EppfModel::theta() const {
  if (kind_ != Kind::pitman_yor) throw InvalidState("EppfModel: theta is Pitman-Yor only");
  return theta_;
}

int EppfModel::n_cap() const {
  return kind_ == Kind::gibbs ? v_->n_max() : std::numeric_limits<int>::max();
}

int EppfModel::max_blocks() const {
  if (kind_ == Kind::pitman_yor && sigma_ < 0.0) return py_max_blocks_;
  return std::numeric_limits<int>::max();
}

LogReal EppfModel::eppf(std::span<const int> sizes) const {
  long n = 0;
  for (int s : sizes) {
    if (s < 1) throw InvalidArgument("eppf: block sizes must be positive");
    n += s;
  }
  int k = static_cast<int>(sizes.size());
  if (k == 0) return LogReal::one();

  switch (kind_) {
    case Kind::pitman_yor: {
      if (sigma_ < 0.0 && k > py_max_blocks_) return LogReal::zero();
      double lg = 0.0;
      for (int i = 1; i < k; ++i) lg += std::log(theta_ + static_cast<double>(i) * sigma_);
      for (int s : sizes) lg += log_rising(1.0 - sigma_, s - 1);
      lg -= log_rising(theta_ + 1.0, n - 1);
      return LogReal::from_log(lg);
    }
    case Kind::gibbs: {
      if (n > v_->n_max()) throw ResourceLimit("eppf: n exceeds the V-table height");
      double lg = v_->log_v(static_cast<int>(n), k);
      for (int s : sizes) lg += log_rising(1.0 - sigma_, s - 1);
      return LogReal::from_log(lg);
    }
    case Kind::custom: {
      double lg = custom_(sizes);
      if (std::isnan(lg) || lg > 1e-9)
        throw InvalidState("eppf: custom evaluator returned an invalid log-probability");
      return LogReal::from_log(lg);
    }
  }
  throw InvalidState("eppf: unreachable");
}

LogReal EppfModel::eppf(const BlockSizes& sizes) const { return eppf(std::span(sizes.sizes)); }

std::vector<double> EppfModel::predictive_weights(const BlockSizes& sizes) const {
  int k = sizes.k();
  if (k == 0) return {1.0};
  LogReal q0 = eppf(sizes);
  if (q0.is_zero())
    throw InvalidState("predictive_weights: current configuration has zero mass");
  std::vector<double> w(static_cast<size_t>(k) + 1);
  for (int i = 0; i < k; ++i) w[static_cast<size_t>(i)] = (eppf(sizes.with_incremented(i)) / q0).value();
  w[static_cast<size_t>(k)] = (eppf(sizes.with_appended_singleton()) / q0).value();
  return w;
}

Partition EppfModel::sample_latent_partition(int n, std::mt19937_64& rng) const {
  if (n < 1) throw InvalidArgument("sample_latent_partition: n must be >= 1");
  if (n > n_cap()) throw ResourceLimit("sample_latent_partition: n exceeds the V-table height");
  std::vector<int> assign(static_cast<size_t>(n));
  BlockSizes cur;
  for (int i = 0; i < n; ++i) {
    std::vector<double> w = predictive_weights(cur);
    double u = next_unit(rng);
    double acc = 0.0;
    int pick = static_cast<int>(w.size()) - 1;
    for (size_t j = 0; j < w.size(); ++j) {
      acc += w[j];
      if (u < acc) {
        pick = static_cast<int>(j);
        break;
      }
    }
    if (pick == cur.k())
      cur = cur.with_appended_singleton();
    else
      cur = cur.with_incremented(pick);
    assign[static_cast<size_t>(i)] = pick;
  }
  return Partition::from_assignments(assign);
}

}  // namespace atompart
