#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ibclab/experiment_config.hpp"
#include "ibclab/sparse.hpp"

namespace ibclab {

/// One pass/fail comparison: `relation` spells out how measured is held
/// against oracle ("abs_diff_le": |measured - oracle| <= tolerance;
/// "ge"/"gt"/"le": one-sided against oracle).
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  std::string relation = "abs_diff_le";
  bool pass = false;
  std::string note;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<CheckResult> checks;
  nlohmann::json summary;
  std::vector<std::string> csv_paths;
  std::string summary_path;

  bool all_pass() const;
};

/// Runs one named experiment: writes one CSV per sweep plus summary.json
/// under config.output_dir and returns the report. Throws ConfigError for
/// unknown experiments and propagates solver failures.
ExperimentReport run(const ExperimentConfig& config);

/// Coordinate text format: header "dim nnz", then "row col re im" lines at
/// 17 significant digits.
void export_matrix(const SparseHermitian& a, const std::string& path);
SparseHermitian import_matrix(FockSpacePtr space, const std::string& path);

/// Space construction shared by experiments and tests: per-sector node
/// caps from the config applied on top of the grid.
FockSpacePtr make_space(const ModelParams& model,
                        const ExperimentConfig::Grid& grid, int ladder_index);

/// Assembles the Hamiltonian variant selected by the config on `space`
/// (cutoff kind wins over ibc kind when set).
SparseHermitian assemble_from_config(const ExperimentConfig& config,
                                     const FockSpacePtr& space,
                                     double shell_delta = 0.0);

}  // namespace ibclab
