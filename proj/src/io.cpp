#include "atompart/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace atompart {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidArgument("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidArgument(file.string() + ": " + e.what());
  }
  return j;
}

double require_number(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw InvalidModel(ctx + ": missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

EppfModel model_from_json(const json& root, const std::filesystem::path& dir, bool validate) {
  if (!root.contains("eppf") || !root["eppf"].is_object())
    throw InvalidModel("model file: missing \"eppf\" object");
  const json& e = root["eppf"];
  std::string type = e.value("type", "");
  if (type == "pitman_yor") {
    return EppfModel::pitman_yor(require_number(e, "sigma", "eppf"),
                                 require_number(e, "theta", "eppf"));
  }
  if (type == "gibbs") {
    double sigma = require_number(e, "sigma", "eppf");
    if (!e.contains("v_table_file") || !e["v_table_file"].is_string())
      throw InvalidModel("eppf: gibbs models need \"v_table_file\"");
    std::filesystem::path vfile = e["v_table_file"].get<std::string>();
    if (vfile.is_relative()) vfile = dir / vfile;
    VTable table = load_v_table_csv(vfile, sigma);
    if (validate) table.validate();
    return EppfModel::gibbs(sigma, std::move(table));
  }
  throw InvalidModel("eppf: unknown type \"" + type + "\"");
}

BaseMeasure base_measure_from_json(const json& root) {
  if (!root.contains("base_measure") || !root["base_measure"].is_object())
    throw InvalidModel("base measure file: missing \"base_measure\" object");
  const json& b = root["base_measure"];
  if (b.contains("family")) {
    std::string family = b["family"].get<std::string>();
    int truncation = static_cast<int>(require_number(b, "truncation", "base_measure"));
    double mass = require_number(b, "total_atom_mass", "base_measure");
    if (family == "power_law")
      return BaseMeasure::power_law(require_number(b, "exponent", "base_measure"), truncation,
                                    mass);
    if (family == "geometric")
      return BaseMeasure::geometric(require_number(b, "ratio", "base_measure"), truncation, mass);
    throw InvalidModel("base_measure: unknown family \"" + family + "\"");
  }
  if (!b.contains("atoms") || !b["atoms"].is_array())
    throw InvalidModel("base_measure: missing \"atoms\" array");
  std::vector<double> atoms;
  for (const auto& v : b["atoms"]) {
    if (!v.is_number()) throw InvalidModel("base_measure: atoms must be numbers");
    atoms.push_back(v.get<double>());
  }
  BaseMeasure h = BaseMeasure::from_atoms(std::move(atoms));
  if (b.contains("diffuse")) {
    double diffuse = b["diffuse"].get<double>();
    if (std::abs(diffuse - h.diffuse_mass()) > 1e-9)
      throw InvalidModel("base_measure: diffuse mass disagrees with 1 - sum(atoms)");
  }
  return h;
}

}  // namespace

EppfModel load_model(const std::filesystem::path& file, bool validate) {
  return model_from_json(load_json(file), file.parent_path(), validate);
}

BaseMeasure load_base_measure(const std::filesystem::path& file) {
  return base_measure_from_json(load_json(file));
}

VTable load_v_table_csv(const std::filesystem::path& file, double sigma) {
  std::ifstream in(file);
  if (!in) throw InvalidArgument("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,k,log_v", 0) != 0)
    throw InvalidModel(file.string() + ": expected header n,k,log_v");
  std::map<std::pair<int, int>, double> entries;
  int n_max = 0;
  size_t lineno = 1;
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto parse_int = [&](const std::string& s, int& out) {
    const char* last = s.data() + s.size();
    auto res = std::from_chars(s.data(), last, out);
    return res.ec == std::errc() && res.ptr == last;
  };
  // strtod so that "-inf" rows (zero weights, e.g. sigma < 0 past the
  // block cap) survive a write/load round trip.
  auto parse_log = [&](const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !std::isnan(out);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string f1, f2, f3;
    int n = 0, k = 0;
    double lv = 0.0;
    if (!std::getline(row, f1, ',') || !std::getline(row, f2, ',') || !std::getline(row, f3) ||
        !parse_int(trim(f1), n) || !parse_int(trim(f2), k) || !parse_log(trim(f3), lv))
      throw InvalidModel(file.string() + ": bad row at line " + std::to_string(lineno));
    if (n < 1 || k < 1 || k > n)
      throw InvalidModel(file.string() + ": index out of range at line " + std::to_string(lineno));
    if (!entries.emplace(std::make_pair(n, k), lv).second)
      throw InvalidModel(file.string() + ": duplicate entry at line " + std::to_string(lineno));
    n_max = std::max(n_max, n);
  }
  if (n_max == 0) throw InvalidModel(file.string() + ": no entries");
  std::vector<double> log_v;
  log_v.reserve(static_cast<size_t>(n_max) * (static_cast<size_t>(n_max) + 1) / 2);
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 1; k <= n; ++k) {
      auto it = entries.find({n, k});
      if (it == entries.end())
        throw InvalidModel(file.string() + ": missing entry for n=" + std::to_string(n) +
                           ", k=" + std::to_string(k));
      log_v.push_back(it->second);
    }
  }
  return VTable(sigma, n_max, std::move(log_v));
}

void write_v_table_csv(std::ostream& os, const VTable& table) {
  os << "n,k,log_v\n";
  char buf[64];
  for (int n = 1; n <= table.n_max(); ++n) {
    for (int k = 1; k <= n; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", table.log_v(n, k));
      os << n << ',' << k << ',' << buf << '\n';
    }
  }
}

std::string partition_to_json(const Partition& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks()) blocks.push_back(b);
  return blocks.dump();
}

Partition partition_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("partition: ") + e.what());
  }
  if (!j.is_array()) throw InvalidArgument("partition: expected an array of blocks");
  std::vector<std::vector<int>> blocks;
  int n = 0;
  for (const auto& b : j) {
    if (!b.is_array()) throw InvalidArgument("partition: blocks must be arrays");
    std::vector<int> block;
    for (const auto& v : b) {
      if (!v.is_number_integer()) throw InvalidArgument("partition: elements must be integers");
      block.push_back(v.get<int>());
      n = std::max(n, block.back());
    }
    blocks.push_back(std::move(block));
  }
  return Partition::from_blocks(n, std::move(blocks));
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  json root = load_json(file);
  ExperimentConfig cfg;
  cfg.model = model_from_json(root, file.parent_path(), true);
  cfg.base = base_measure_from_json(root);
  if (!root.contains("experiment") || !root["experiment"].is_object())
    throw InvalidModel("experiment config: missing \"experiment\" object");
  const json& e = root["experiment"];
  if (!e.contains("checkpoints") || !e["checkpoints"].is_array())
    throw InvalidModel("experiment: missing \"checkpoints\" array");
  for (const auto& v : e["checkpoints"]) cfg.checkpoints.push_back(v.get<long>());
  cfg.r_max = e.value("r_max", 8);
  cfg.replicates = e.value("replicates", 20);
  cfg.seed = e.value("seed", std::uint64_t{1});
  cfg.threads = e.value("threads", 0);
  if (e.contains("statistics")) {
    for (const auto& s : e["statistics"]) {
      StatisticSpec spec;
      spec.name = s.value("name", "");
      spec.r = s.value("r", 1);
      if (s.contains("target")) spec.target = s["target"].get<double>();
      spec.tolerance = s.value("tolerance", 0.05);
      cfg.statistics.push_back(std::move(spec));
    }
  }
  return cfg;
}

void write_paths_csv(std::ostream& os, const ExperimentReport& report, int r_max) {
  os << "replicate,n,K_n,N_n,Lambda_n,merged";
  for (int r = 1; r <= r_max; ++r) os << ",k" << r;
  os << '\n';
  for (const auto& path : report.paths) {
    for (const auto& st : path.checkpoints) {
      os << path.path_index << ',' << st.n << ',' << st.latent_blocks << ',' << st.diffuse_blocks
         << ',' << st.atom_clusters << ',' << st.merged_blocks;
      for (long c : st.small_counts) os << ',' << c;
      os << '\n';
    }
  }
}

std::string experiment_summary_json(const ExperimentConfig& cfg, const ExperimentReport& report) {
  json out;
  out["schema"] = kSchemaVersion;
  out["replicates"] = cfg.replicates;
  out["seed"] = cfg.seed;
  out["r_max"] = cfg.r_max;
  out["checkpoints"] = cfg.checkpoints;
  json stats = json::array();
  bool all_pass = true;
  for (const auto& res : report.statistics) {
    json s;
    s["name"] = res.name;
    if (res.name == "kr_fraction") s["r"] = res.r;
    s["estimate"] = res.estimate;
    s["std_error"] = res.std_error;
    s["target"] = res.target;
    s["tolerance"] = res.tolerance;
    s["pass"] = res.pass;
    all_pass = all_pass && res.pass;
    stats.push_back(std::move(s));
  }
  out["statistics"] = std::move(stats);
  out["all_pass"] = all_pass;
  return out.dump(2);
}

}  // namespace atompart
