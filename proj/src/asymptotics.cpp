#include "atompart/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "atompart/logreal.hpp"

namespace atompart {

namespace {

constexpr long kPathCap = 1000000;
constexpr long kCustomPathCap = 1000;
constexpr int kRMaxCap = 1024;

}  // namespace

Normalizer Normalizer::power(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw InvalidArgument("Normalizer::power: sigma must be in (0,1)");
  return Normalizer(Kind::power, sigma);
}

double Normalizer::operator()(double n) const {
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::log_n:
      return std::log(n);
    case Kind::power:
      return std::pow(n, exponent_);
  }
  throw InvalidState("Normalizer: unreachable");
}

Normalizer gibbs_normalizer(double sigma) {
  if (sigma >= 1.0) throw InvalidArgument("gibbs_normalizer: sigma must be < 1");
  if (sigma < 0.0) return Normalizer::constant();
  if (sigma == 0.0) return Normalizer::log_n();
  return Normalizer::power(sigma);
}

double SlowlyVarying::operator()(double x) const {
  switch (kind) {
    case Kind::constant:
      return constant;
    case Kind::log_geometric: {
      double t = std::max(a * x * (1.0 - rho), 1.0);
      return 1.0 + std::log(t) / std::log(1.0 / rho);
    }
  }
  throw InvalidState("SlowlyVarying: unreachable");
}

KarlinRegime karlin_regime(const BaseMeasure& h) {
  KarlinRegime reg;
  switch (h.family()) {
    case AtomFamily::none:
      reg.finite_support = true;
      return reg;
    case AtomFamily::power_law: {
      double s = h.family_param();
      reg.sigma0 = 1.0 / s;
      reg.ell0.kind = SlowlyVarying::Kind::constant;
      reg.ell0.constant = std::pow(std::riemann_zeta(s), -1.0 / s);
      reg.z0 = std::pow(h.atom_mass(), reg.sigma0) * std::tgamma(1.0 - reg.sigma0);
      return reg;
    }
    case AtomFamily::geometric: {
      reg.sigma0 = 0.0;
      reg.ell0.kind = SlowlyVarying::Kind::log_geometric;
      reg.ell0.rho = h.family_param();
      reg.ell0.a = h.atom_mass();
      reg.z0 = 1.0;
      return reg;
    }
  }
  throw InvalidState("karlin_regime: unreachable");
}

double kr_limit_constant(double sigma, int r) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw InvalidArgument("kr_limit_constant: sigma must be in (0,1)");
  if (r < 1) throw InvalidArgument("kr_limit_constant: r must be >= 1");
  return std::exp(std::log(sigma) + std::lgamma(static_cast<double>(r) - sigma) -
                  std::lgamma(1.0 - sigma) - log_factorial(r));
}

LatentCrpSampler::LatentCrpSampler(const EppfModel& model) : model_(&model) {}

int LatentCrpSampler::step(std::mt19937_64& rng) {
  int table;
  if (n_ == 0) {
    table = 0;
  } else {
    switch (model_->kind()) {
      case EppfModel::Kind::pitman_yor: {
        double sigma = model_->sigma();
        double theta = model_->theta();
        double new_mass = std::max(0.0, theta + sigma * static_cast<double>(k_));
        double u = next_unit(rng) * (theta + static_cast<double>(n_));
        if (u < new_mass)
          table = k_;
        else if (u < new_mass + static_cast<double>(n_ - k_))
          table = join_events_[next_below(rng, static_cast<std::uint64_t>(n_ - k_))];
        else
          table = static_cast<int>(next_below(rng, static_cast<std::uint64_t>(k_)));
        break;
      }
      case EppfModel::Kind::gibbs: {
        const VTable* vt = model_->v_table();
        if (n_ + 1 > vt->n_max())
          throw ResourceLimit("LatentCrpSampler: path exceeds the V-table height");
        double sigma = model_->sigma();
        int n = static_cast<int>(n_);
        double p_new = std::exp(vt->log_v(n + 1, k_ + 1) - vt->log_v(n, k_));
        if (next_unit(rng) < p_new) {
          table = k_;
        } else {
          double mass = static_cast<double>(n_) - sigma * static_cast<double>(k_);
          double v = next_unit(rng) * mass;
          if (v < static_cast<double>(n_ - k_))
            table = join_events_[next_below(rng, static_cast<std::uint64_t>(n_ - k_))];
          else
            table = static_cast<int>(next_below(rng, static_cast<std::uint64_t>(k_)));
        }
        break;
      }
      case EppfModel::Kind::custom: {
        std::vector<double> w = model_->predictive_weights(generic_sizes_);
        double u = next_unit(rng);
        double acc = 0.0;
        table = static_cast<int>(w.size()) - 1;
        for (size_t j = 0; j < w.size(); ++j) {
          acc += w[j];
          if (u < acc) {
            table = static_cast<int>(j);
            break;
          }
        }
        break;
      }
      default:
        throw InvalidState("LatentCrpSampler: unreachable");
    }
  }
  if (table == k_) {
    sizes_.push_back(1);
    if (model_->kind() == EppfModel::Kind::custom)
      generic_sizes_ = generic_sizes_.with_appended_singleton();
    ++k_;
  } else {
    ++sizes_[static_cast<size_t>(table)];
    join_events_.push_back(table);
    if (model_->kind() == EppfModel::Kind::custom)
      generic_sizes_ = generic_sizes_.with_incremented(table);
  }
  ++n_;
  return table;
}

TwoLevelSimulator::TwoLevelSimulator(const EppfModel& model, const BaseMeasure& h,
                                     std::uint64_t seed, std::uint64_t path_index)
    : crp_(model), h_(&h), rng_(seed, path_index),
      atom_seen_(static_cast<size_t>(h.atom_count()), 0) {}

Label TwoLevelSimulator::step() {
  int before = crp_.tables();
  int t = crp_.step(rng_.crp);
  if (t == before) {
    Label dish = h_->sample_dish(rng_);
    table_dish_.push_back(dish);
    if (dish.is_atom()) {
      char& seen = atom_seen_[static_cast<size_t>(dish.atom_index()) - 1];
      if (!seen) {
        seen = 1;
        ++atom_clusters_;
      }
    } else {
      ++diffuse_blocks_;
    }
  }
  Label dish = table_dish_[static_cast<size_t>(t)];
  ++cluster_size_[dish.key()];
  return dish;
}

CheckpointStats TwoLevelSimulator::checkpoint(int r_max) const {
  CheckpointStats st;
  st.n = crp_.customers();
  st.latent_blocks = crp_.tables();
  st.diffuse_blocks = diffuse_blocks_;
  st.atom_clusters = atom_clusters_;
  st.merged_blocks = static_cast<long>(cluster_size_.size());
  st.small_counts.assign(static_cast<size_t>(r_max), 0);
  for (const auto& [key, size] : cluster_size_) {
    st.block_mass += size;
    if (size <= r_max) ++st.small_counts[static_cast<size_t>(size) - 1];
  }
  if (st.merged_blocks != st.diffuse_blocks + st.atom_clusters)
    throw InvalidState("TwoLevelSimulator: cluster count disagrees with its decomposition");
  if (st.block_mass != st.n)
    throw InvalidState("TwoLevelSimulator: cluster sizes do not sum to n");
  return st;
}

long simulate_path_cap() { return kPathCap; }

SamplePath simulate_path(const EppfModel& model, const BaseMeasure& h,
                         std::span<const long> checkpoints, int r_max, std::uint64_t seed,
                         std::uint64_t path_index) {
  if (checkpoints.empty()) throw InvalidArgument("simulate_path: no checkpoints");
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1) throw InvalidArgument("simulate_path: checkpoints must be >= 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw InvalidArgument("simulate_path: checkpoints must be strictly increasing");
  }
  if (r_max < 1 || r_max > kRMaxCap) throw InvalidArgument("simulate_path: bad r_max");
  long last = checkpoints.back();
  long cap = model.kind() == EppfModel::Kind::custom ? kCustomPathCap : kPathCap;
  if (last > cap) throw ResourceLimit("simulate_path: final checkpoint exceeds the path cap");

  SamplePath path;
  path.seed = seed;
  path.path_index = path_index;
  path.checkpoints.reserve(checkpoints.size());
  TwoLevelSimulator sim(model, h, seed, path_index);
  size_t next = 0;
  for (long i = 1; i <= last; ++i) {
    sim.step();
    if (i == checkpoints[next]) {
      path.checkpoints.push_back(sim.checkpoint(r_max));
      ++next;
    }
  }
  return path;
}

namespace {

struct Summary {
  double mean = 0.0;
  double se = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  double n = static_cast<double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

double default_target(const StatisticSpec& spec, const ExperimentConfig& cfg) {
  if (spec.target) return *spec.target;
  double a = cfg.base.atom_mass();
  if (spec.name == "merged_ratio") return 1.0 - a;
  if (spec.name == "saturation") return 1.0;
  if (spec.name == "loglog_slope") {
    if (!cfg.model.has_sigma())
      throw InvalidArgument("run_experiment: loglog_slope needs an explicit target for custom models");
    double sigma = cfg.model.sigma();
    if (a < 1.0) return sigma;
    KarlinRegime reg = karlin_regime(cfg.base);
    if (reg.finite_support)
      throw InvalidArgument("run_experiment: loglog_slope has no limit target for finite atom support");
    return sigma * reg.sigma0;
  }
  if (spec.name == "kr_fraction") {
    if (!cfg.model.has_sigma())
      throw InvalidArgument("run_experiment: kr_fraction needs an explicit target for custom models");
    double sigma = cfg.model.sigma();
    if (a < 1.0) return kr_limit_constant(sigma, spec.r);
    KarlinRegime reg = karlin_regime(cfg.base);
    if (reg.finite_support || !(reg.sigma0 > 0.0))
      throw InvalidArgument("run_experiment: kr_fraction needs an explicit target for this base measure");
    return kr_limit_constant(sigma * reg.sigma0, spec.r);
  }
  if (spec.name == "latent_over_cn") {
    if (cfg.model.kind() != EppfModel::Kind::pitman_yor || cfg.model.sigma() > 0.0)
      throw InvalidArgument(
          "run_experiment: latent_over_cn has a default target only for Pitman-Yor, sigma <= 0");
    double sigma = cfg.model.sigma();
    double theta = cfg.model.theta();
    return sigma == 0.0 ? theta : theta / (-sigma);
  }
  throw InvalidArgument("run_experiment: unknown statistic " + spec.name);
}

double slope_of(const SamplePath& path) {
  long last = path.checkpoints.back().n;
  double lo = static_cast<double>(last) / 100.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (const auto& st : path.checkpoints) {
    if (static_cast<double>(st.n) < lo) continue;
    double x = std::log(static_cast<double>(st.n));
    double y = std::log(static_cast<double>(st.merged_blocks));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1;
  }
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw InvalidArgument("run_experiment: replicates must be >= 1");
  if (cfg.replicates > 1000000) throw ResourceLimit("run_experiment: too many replicates");
  for (const auto& spec : cfg.statistics) {
    if (spec.name == "kr_fraction" && (spec.r < 1 || spec.r > cfg.r_max))
      throw InvalidArgument("run_experiment: kr_fraction r out of range");
    if (spec.name == "loglog_slope") {
      long last = cfg.checkpoints.empty() ? 0 : cfg.checkpoints.back();
      int usable = 0;
      for (long c : cfg.checkpoints)
        if (static_cast<double>(c) >= static_cast<double>(last) / 100.0) ++usable;
      if (usable < 2)
        throw InvalidArgument("run_experiment: loglog_slope needs >= 2 checkpoints in the top two decades");
    }
  }

  ExperimentReport report;
  report.paths.resize(static_cast<size_t>(cfg.replicates));
  int threads = cfg.threads > 0 ? cfg.threads
                                : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, cfg.replicates);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= cfg.replicates) return;
      report.paths[static_cast<size_t>(i)] =
          simulate_path(cfg.model, cfg.base, cfg.checkpoints, cfg.r_max, cfg.seed,
                        static_cast<std::uint64_t>(i));
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& spec : cfg.statistics) {
    StatisticResult res;
    res.name = spec.name;
    res.r = spec.r;
    res.tolerance = spec.tolerance;
    res.target = default_target(spec, cfg);
    std::vector<double> xs;
    xs.reserve(report.paths.size());
    for (const auto& path : report.paths) {
      const CheckpointStats& fin = path.checkpoints.back();
      if (spec.name == "merged_ratio") {
        xs.push_back(static_cast<double>(fin.merged_blocks) /
                     static_cast<double>(fin.latent_blocks));
      } else if (spec.name == "loglog_slope") {
        xs.push_back(slope_of(path));
      } else if (spec.name == "kr_fraction") {
        xs.push_back(static_cast<double>(fin.small_counts[static_cast<size_t>(spec.r) - 1]) /
                     static_cast<double>(fin.merged_blocks));
      } else if (spec.name == "latent_over_cn") {
        Normalizer cn = gibbs_normalizer(cfg.model.sigma());
        xs.push_back(static_cast<double>(fin.latent_blocks) / cn(static_cast<double>(fin.n)));
      } else if (spec.name == "saturation") {
        xs.push_back(fin.merged_blocks == cfg.base.atom_count() ? 1.0 : 0.0);
      }
    }
    Summary s = summarize(xs);
    res.estimate = s.mean;
    res.std_error = s.se;
    res.pass = std::abs(res.estimate - res.target) <= res.tolerance;
    report.statistics.push_back(std::move(res));
  }
  return report;
}

}  // namespace atompart
