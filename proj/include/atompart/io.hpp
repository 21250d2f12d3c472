#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "atompart/asymptotics.hpp"
#include "atompart/base_measure.hpp"
#include "atompart/eppf.hpp"

namespace atompart {

inline constexpr const char* kSchemaVersion = "atompart/v1";

// Model files: {"eppf":{"type":"pitman_yor","sigma":0.5,"theta":1.0}} or
// {"eppf":{"type":"gibbs","sigma":0.5,"v_table_file":"v.csv"}} with the
// table path relative to the model file. With validate set, Gibbs tables
// must satisfy the backward recursion (rejected as InvalidModel otherwise).
EppfModel load_model(const std::filesystem::path& file, bool validate = true);

// {"base_measure":{"atoms":[...],"diffuse":...}} or
// {"base_measure":{"family":"power_law","exponent":2.0,"truncation":10000,
//   "total_atom_mass":1.0}} (geometric uses "ratio" instead of "exponent").
BaseMeasure load_base_measure(const std::filesystem::path& file);

// CSV with header n,k,log_v and one row per 1 <= k <= n <= n_max.
VTable load_v_table_csv(const std::filesystem::path& file, double sigma);
void write_v_table_csv(std::ostream& os, const VTable& table);

std::string partition_to_json(const Partition& p);
Partition partition_from_json(const std::string& text);

// {"eppf":..., "base_measure":..., "experiment":{"checkpoints":[...],
//   "replicates":..., "r_max":..., "seed":..., "threads":...,
//   "statistics":[{"name":...,"r":...,"target":...,"tolerance":...}]}}.
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

// One row per (replicate, checkpoint):
// replicate,n,K_n,N_n,Lambda_n,merged,k1,...,k{r_max}.
void write_paths_csv(std::ostream& os, const ExperimentReport& report, int r_max);

std::string experiment_summary_json(const ExperimentConfig& cfg, const ExperimentReport& report);

}  // namespace atompart
