#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ibclab/assemble.hpp"
#include "ibclab/experiments.hpp"

using namespace ibclab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("ibclab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config round-trips through serialization losslessly") {
  ExperimentConfig c = default_config("grid-sweep");
  c.model.g = 1.234567890123456;
  c.seed = 987654321;
  c.ibc.kind = "robin";
  c.ibc.alpha = Complex(-12.56637061435917, 0.125);
  c.sweep.sigmas = {0.7071067811865476, 0.3};
  std::string s1 = c.to_json_string();
  ExperimentConfig c2 = ExperimentConfig::from_json_string(s1);
  std::string s2 = c2.to_json_string();
  CHECK(s1 == s2);
  CHECK(c2.model.g == c.model.g);
  CHECK(c2.ibc.alpha == c.ibc.alpha);
  CHECK(c2.sweep.sigmas == c.sweep.sigmas);
}

TEST_CASE("config validation rejects bad input") {
  ExperimentConfig c = default_config("ground");
  c.experiment = "no-such-thing";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config("ground");
  c.grid.ladder.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config("ground");
  c.sweep.sigmas = {-1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config("ground");
  c.model.e0 = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_string("{nope"), ConfigError);
  CHECK_THROWS_AS(default_config("bogus"), ConfigError);
}

TEST_CASE("all experiment defaults pass validation") {
  for (const auto& name : experiment_names()) {
    ExperimentConfig c = default_config(name);
    CHECK_NOTHROW(c.validate());
  }
  CHECK(!config_schema().empty());
}

TEST_CASE("ground experiment writes deterministic CSV and summary") {
  ExperimentConfig c = default_config("ground");
  c.grid.ladder = {{40, 0.2}};
  c.tolerances.ground_rel = 0.2;  // coarse grid, loose gate
  auto dir = temp_dir("ground");
  c.output_dir = (dir / "a").string();
  auto rep1 = run(c);
  CHECK(rep1.all_pass());
  CHECK(rep1.summary.contains("checks"));
  for (const auto& chk : rep1.summary["checks"]) {
    CHECK(chk.contains("measured"));
    CHECK(chk.contains("oracle"));
    CHECK(chk.contains("tolerance"));
    CHECK(chk.contains("pass"));
  }

  c.output_dir = (dir / "b").string();
  auto rep2 = run(c);
  CHECK(slurp(rep1.csv_paths[0]) == slurp(rep2.csv_paths[0]));
  fs::remove_all(dir);
}

TEST_CASE("csv files use comma-separated LF rows with a header") {
  ExperimentConfig c = default_config("ground");
  c.grid.ladder = {{25, 0.3}};
  c.tolerances.ground_rel = 0.5;
  auto dir = temp_dir("csvfmt");
  c.output_dir = dir.string();
  auto rep = run(c);
  std::string text = slurp(rep.csv_paths[0]);
  CHECK(text.rfind("k,eigenvalue,residual\n", 0) == 0);
  CHECK(text.find("\r") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("export and re-import reproduce the matrix bit-exactly") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = FockSpace::build(RadialGrid{0.4, 15, 0.0}, 2);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  auto dir = temp_dir("export");
  const std::string path = (dir / "m.txt").string();
  export_matrix(a, path);
  SparseHermitian b = import_matrix(sp, path);
  REQUIRE(a.nnz() == b.nnz());
  for (std::int64_t i = 0; i < a.nnz(); ++i) {
    CHECK(a.entries()[i].row == b.entries()[i].row);
    CHECK(a.entries()[i].col == b.entries()[i].col);
    CHECK(a.entries()[i].value == b.entries()[i].value);  // bit-exact
  }
  fs::remove_all(dir);
}

TEST_CASE("trivial matrix export format") {
  auto sp = FockSpace::build(RadialGrid{1.0, 1, 0.0}, 0);
  SparseHermitian zero(sp, {});
  auto dir = temp_dir("zero");
  const std::string path = (dir / "z.txt").string();
  export_matrix(zero, path);
  CHECK(slurp(path) == "1 0\n");
  fs::remove_all(dir);
}

TEST_CASE("exported nnz respects the block-tridiagonal bound") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = FockSpace::build(RadialGrid{0.4, 15, 0.0}, 2);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  CHECK(a.block_tridiagonal());
  // per row: diagonal + 2 kinetic neighbors per coordinate + one coupling
  // down + one coupling up
  std::int64_t bound = 0;
  for (int n = 0; n <= 2; ++n) bound += sp->sector_dim(n) * (2 * n + 3);
  CHECK(a.nnz() <= bound);
  CHECK(a.nnz() > sp->dim());  // strictly more than a diagonal
}

TEST_CASE("robin-audit experiment on a reduced sample count") {
  ExperimentConfig c = default_config("robin-audit");
  c.sweep.audit_count = 12;
  auto dir = temp_dir("audit");
  c.output_dir = dir.string();
  auto rep = run(c);
  CHECK(rep.all_pass());
  bool saw_admissible = false, saw_perturbed = false, saw_maps = false;
  for (const auto& chk : rep.checks) {
    if (chk.name == "max_admissible_defect") saw_admissible = true;
    if (chk.name == "min_perturbed_defect") saw_perturbed = true;
    if (chk.name == "dirichlet_mapping_entrywise") saw_maps = true;
  }
  CHECK(saw_admissible);
  CHECK(saw_perturbed);
  CHECK(saw_maps);
  fs::remove_all(dir);
}

TEST_CASE("ground experiment with free coupling reports zero energy") {
  ExperimentConfig c = default_config("ground");
  c.model = {0.0, 1.0, 1};
  c.grid.ladder = {{30, 0.3}};
  auto dir = temp_dir("ground_free");
  c.output_dir = dir.string();
  auto rep = run(c);
  REQUIRE(rep.checks.size() >= 1);
  CHECK(rep.checks[0].name == "ground_energy_free");
  CHECK(rep.checks[0].pass);
  CHECK(std::abs(rep.checks[0].measured) <= 1e-10);
  CHECK(rep.all_pass());
  fs::remove_all(dir);
}

TEST_CASE("two-center experiment passes its gates") {
  ExperimentConfig c = default_config("two-center");
  c.sweep.samples_per_radius = 20;
  auto dir = temp_dir("twocenter");
  c.output_dir = dir.string();
  auto rep = run(c);
  CHECK(rep.all_pass());
  fs::remove_all(dir);
}

TEST_CASE("evolve experiment on a tiny instance conserves norm and energy") {
  ExperimentConfig c = default_config("evolve");
  c.grid.ladder = {{40, 0.21}};
  c.evolve.steps = 60;
  c.evolve.snapshot_every = 4;
  c.evolve.cn_tol = 1e-13;
  c.evolve.refine_levels = 2;
  c.evolve.refine_steps = 30;
  auto dir = temp_dir("evolve");
  c.output_dir = dir.string();
  auto rep = run(c);
  for (const auto& chk : rep.checks) {
    INFO(chk.name, " measured=", chk.measured);
    if (chk.name == "norm_drift") CHECK(chk.measured <= 1e-10);
    if (chk.name == "energy_drift") CHECK(chk.measured <= 1e-8);
    if (chk.name == "flux_balance_order") CHECK(chk.measured >= 1.0);
  }
  CHECK(rep.all_pass());
  fs::remove_all(dir);
}

TEST_CASE("make_space applies non-increasing sector caps") {
  ExperimentConfig::Grid g;
  g.ladder = {{30, 0.2}};
  g.sector_node_caps = {0, 0, 20, 25};  // the 25 clamps down to 20
  auto sp = make_space({1.0, 1.0, 3}, g, 0);
  CHECK(sp->sector_nodes(0) == 30);
  CHECK(sp->sector_nodes(1) == 30);
  CHECK(sp->sector_nodes(2) == 20);
  CHECK(sp->sector_nodes(3) == 20);
}
