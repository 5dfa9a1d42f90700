#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fraclab/harness.hpp"

using namespace fraclab;

namespace {

std::filesystem::path temp_dir(const std::string& sub) {
  auto dir = std::filesystem::temp_directory_path() / "fraclab_harness_test" / sub;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// every line of the CSV without the trailing wall-clock column
std::vector<std::string> csv_rows_without_wallclock(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    rows.push_back(line.substr(0, cut));
  }
  return rows;
}

} // namespace

TEST_CASE("experiment ids round-trip and unknown ids are refused") {
  for (ExperimentId id : all_experiments())
    CHECK(experiment_from_string(to_string(id)) == id);
  CHECK_THROWS_AS(experiment_from_string("not_an_experiment"), std::invalid_argument);
}

TEST_CASE("config echo is complete and json round trips") {
  const ExperimentConfig cfg = default_config(ExperimentId::duality);
  const nlohmann::json j = cfg.to_json();
  for (const char* key :
       {"experiment", "grid", "solver", "velocity", "atom", "radii", "atom_radius",
        "beta", "q", "num_samples", "sweep_strengths", "sink_relative_to_s",
        "window_scale", "seed", "output_dir", "workers"})
    CHECK(j.contains(key));
  for (const char* key : {"alpha", "horizon", "cfl", "scheme", "advection", "dealias",
                          "snapshot_stride", "dt", "diag_p"})
    CHECK(j.at("solver").contains(key));

  const ExperimentConfig back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
}

TEST_CASE("duality run with v = 0 pairs to 1e-10") {
  ExperimentConfig cfg = default_config(ExperimentId::duality);
  cfg.grid = GridSpec(1, 256, 4.0);
  cfg.velocity.amplitude = 0.0;
  cfg.velocity.sink_strength = 0.0;
  cfg.output_dir = temp_dir("duality_v0").string();
  const RunRecord rec = run(cfg);
  CHECK(rec.diagnostics.at("rel_error").get<double>() <= 1e-10);
  CHECK(std::filesystem::exists(cfg.output_dir + "/record.json"));
}

TEST_CASE("conservation experiment passes at reduced scale") {
  ExperimentConfig cfg = default_config(ExperimentId::conservation);
  cfg.grid = GridSpec(1, 128, 4.0);
  cfg.num_samples = 3;
  cfg.output_dir = temp_dir("conservation").string();
  const RunRecord rec = run(cfg);
  CHECK(rec.all_pass());
  CHECK(rec.verdicts.size() == 3);
}

TEST_CASE("energy inequality holds trivially for divergence-free drift") {
  ExperimentConfig cfg = default_config(ExperimentId::energy_l2);
  cfg.grid = GridSpec(2, 64, 4.0);
  cfg.velocity.kind = VelocityKind::divergence_free;
  cfg.sink_relative_to_s = 0.0;
  cfg.output_dir = temp_dir("energy_df").string();
  const RunRecord rec = run(cfg);
  CHECK(rec.all_pass());
}

TEST_CASE("solver blow-up is recorded as a failed verdict, not a crash") {
  ExperimentConfig cfg = default_config(ExperimentId::energy_l2);
  cfg.grid = GridSpec(1, 64, 4.0); // d = alpha = 1 violates the hypothesis
  cfg.output_dir = temp_dir("energy_bad").string();
  const RunRecord rec = run(cfg);
  CHECK(!rec.all_pass());
  CHECK(std::filesystem::exists(cfg.output_dir + "/record.json"));
}

TEST_CASE("sweep fans out, patches the axis, and writes incrementally") {
  ExperimentConfig base = default_config(ExperimentId::conservation);
  base.grid = GridSpec(1, 64, 4.0);
  base.num_samples = 1;
  base.solver.horizon = 0.1;
  base.output_dir = temp_dir("sweep").string();
  base.workers = 2;

  const auto records = sweep(base, "alpha", {0.5, 1.0, 1.5});
  REQUIRE(records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double alpha = records[i].config.at("solver").at("alpha").get<double>();
    CHECK(alpha == doctest::Approx(0.5 + 0.5 * i));
    char sub[32];
    std::snprintf(sub, sizeof sub, "run_%03zu", i);
    CHECK(std::filesystem::exists(base.output_dir + "/" + sub + "/record.json"));
  }

  CHECK_THROWS_AS(sweep(base, "no_such_axis", {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(base, "alpha", {}), std::invalid_argument);
}

TEST_CASE("report writes one CSV row per record, reproducibly") {
  ExperimentConfig cfg = default_config(ExperimentId::conservation);
  cfg.grid = GridSpec(1, 64, 4.0);
  cfg.num_samples = 1;
  cfg.solver.horizon = 0.1;
  cfg.output_dir = temp_dir("report_run").string();
  const RunRecord rec = run(cfg);

  const auto dir_a = temp_dir("report_a");
  const auto dir_b = temp_dir("report_b");
  report({rec}, dir_a);
  const RunRecord rec2 = run(cfg); // identical config, new wall clock
  report({rec2}, dir_b);

  const auto rows_a = csv_rows_without_wallclock(dir_a / "summary.csv");
  const auto rows_b = csv_rows_without_wallclock(dir_b / "summary.csv");
  REQUIRE(rows_a.size() == 2); // header + one row
  CHECK(rows_a == rows_b);

  SUBCASE("fitted exponent columns appear for rate records") {
    RunRecord fake;
    fake.config = default_config(ExperimentId::regularization_rate).to_json();
    fake.fitted = {{"exponent_oracle", -1.2}, {"target_exponent", -1.25}};
    fake.verdicts.push_back({"rate_within_15pct", "pass", 0.1, ""});
    const auto dir_c = temp_dir("report_c");
    report({fake}, dir_c);
    std::ifstream in(dir_c / "summary.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.find("exponent,target_exponent") != std::string::npos);
    CHECK(row.find("-1.2") != std::string::npos);
    CHECK(row.find("-1.25") != std::string::npos);
  }

  SUBCASE("empty record list is rejected") {
    CHECK_THROWS_AS(report({}, dir_a), std::invalid_argument);
  }
}

TEST_CASE("records can be reloaded from disk") {
  ExperimentConfig cfg = default_config(ExperimentId::conservation);
  cfg.grid = GridSpec(1, 64, 4.0);
  cfg.num_samples = 1;
  cfg.solver.horizon = 0.1;
  cfg.output_dir = temp_dir("reload").string();
  const RunRecord rec = run(cfg);
  const auto loaded = load_records(cfg.output_dir);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].to_json() == rec.to_json());
}

TEST_CASE("worker count resolution") {
  CHECK(worker_count(3) == 3);
  CHECK(worker_count(0) >= 1);
}
