#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibclab/ibc_spec.hpp"
#include "ibclab/model.hpp"

namespace ibclab {

struct GridPoint {
  int m = 0;
  double h = 0.0;
};

/// Declarative description of one experiment run. Serializes to/from JSON
/// losslessly; `ibclab print-schema` documents every field.
struct ExperimentConfig {
  std::string experiment = "ground";

  ModelParams model;

  struct Ibc {
    std::string kind = "dirichlet";  // dirichlet | neumann | robin
    Complex alpha{0, 0}, beta{0, 0}, gamma{0, 0}, delta{0, 0};
    bool enforce_admissibility = true;
  } ibc;

  struct Cutoff {
    std::string kind = "none";  // none | shell | smeared
    double sigma = 0.5;
  } cutoff;

  struct Grid {
    std::vector<GridPoint> ladder = {{84, 0.1}};
    std::vector<int> sector_node_caps;  // 0 or missing: uncapped
    double capacity = 5e6;
  } grid;

  struct Solver {
    double tol = 1e-8;
    int k = 1;
    std::string mode = "auto";  // auto | dense | lanczos | shift-invert
    int max_matvecs = 200000;
    int basis_size = 0;
  } solver;

  struct Evolve {
    double dt = 0.01;
    int steps = 1000;
    int snapshot_every = 10;
    double cn_tol = 1e-12;
    std::string initial = "vacuum";  // vacuum | ground | sector1-gaussian
    int refine_levels = 3;
    int refine_steps = 100;
  } evolve;

  struct Sweep {
    std::vector<double> sigmas = {1.0, 0.5, 0.25, 0.125};
    std::vector<int> deltas_in_h = {8, 4, 2};
    std::vector<double> radii = {0.5, 1.0, 2.0};
    int samples_per_radius = 100;
    double fit_r_min = 1.0;
    double fit_r_max = 5.0;
    int fit_points = 9;
    int audit_count = 100;
  } sweep;

  struct Tolerances {
    double ground_rel = 0.02;
    double p1_rel = 0.02;
    double p2_rel = 0.05;
    double overlap_min = 0.999;
    double positivity_floor = -1e-10;
    double defect_admissible = 1e-12;
    double defect_violation = 1e-6;
    double mapping_entrywise = 1e-12;
    double norm_drift = 1e-10;
    double energy_drift = 1e-8;
    double min_flux_order = 1.0;
    double shell_terminal_rel = 0.02;
    double gap_terminal_rel = 0.05;
    double mc_residual = 1e-8;
    double decay_rate_abs = 1e-6;
  } tolerances;

  std::string output_dir = "out";
  std::uint64_t seed = 42;
  int jobs = 0;  // 0: hardware concurrency

  void validate() const;

  std::string to_json_string(int indent = 2) const;
  static ExperimentConfig from_json_string(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

/// Built-in defaults for each experiment name.
ExperimentConfig default_config(const std::string& experiment);

/// Human-readable schema of the config dialect.
std::string config_schema();

const std::vector<std::string>& experiment_names();

}  // namespace ibclab
