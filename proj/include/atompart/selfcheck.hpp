#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace atompart {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelfcheckOptions {
  // Optional user files folded into the checks: a Gibbs model file's
  // V-table is loaded without validation and the recursion residual is
  // reported as a named check.
  std::optional<std::filesystem::path> model_file;
  std::optional<std::filesystem::path> base_measure_file;
};

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt);

}  // namespace atompart
