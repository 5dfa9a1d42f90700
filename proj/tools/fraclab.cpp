//
// fraclab command-line driver.
//
//   fraclab run --config cfg.json
//   fraclab sweep --config cfg.json --axis alpha --values 0.5,1.0,1.5
//   fraclab report --dir out/
//   fraclab check --all [--out dir] [--criterion N]
//
// Exit code 0 iff every verdict of every touched run passed.
//

#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fraclab/acceptance.hpp"
#include "fraclab/harness.hpp"

namespace {

fraclab::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return fraclab::ExperimentConfig::from_json(nlohmann::json::parse(in));
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::runtime_error("--values: no values parsed");
  return out;
}

void print_run(const fraclab::RunRecord& rec) {
  const std::string exp = rec.config.at("experiment").get<std::string>();
  for (const auto& v : rec.verdicts) {
    std::printf("[%s] %s/%s margin=%.6g %s\n",
                v.status == "pass" ? "PASS" : (v.status == "fail" ? "FAIL" : "SKIP"),
                exp.c_str(), v.name.c_str(), v.margin, v.detail.c_str());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: periodic pseudo-spectral fractional transport-diffusion lab"};
  app.require_subcommand(1);

  std::string config_path, axis, values_csv, report_dir;
  std::string check_out = "out/acceptance";
  bool check_all = false;
  int workers = 0;
  int criterion = 0;

  auto* cmd_run = app.add_subcommand("run", "run one experiment from a JSON config");
  cmd_run->add_option("--config", config_path, "config file")->required();
  cmd_run->add_option("--workers", workers, "worker threads (0: FRACLAB_WORKERS/auto)");

  auto* cmd_sweep = app.add_subcommand("sweep", "run the experiment across an axis");
  cmd_sweep->add_option("--config", config_path, "config file")->required();
  cmd_sweep->add_option("--axis", axis, "config field, e.g. alpha or grid.n")->required();
  cmd_sweep->add_option("--values", values_csv, "comma-separated values")->required();
  cmd_sweep->add_option("--workers", workers, "worker threads");

  auto* cmd_report = app.add_subcommand("report", "aggregate records into CSV/JSON");
  cmd_report->add_option("--dir", report_dir, "directory holding record.json files")
      ->required();

  auto* cmd_check = app.add_subcommand("check", "run the acceptance suite");
  cmd_check->add_flag("--all", check_all, "run every criterion");
  cmd_check->add_option("--criterion", criterion, "run a single criterion (1-10)");
  cmd_check->add_option("--out", check_out, "output directory for run records");
  cmd_check->add_option("--workers", workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      fraclab::ExperimentConfig cfg = load_config(config_path);
      if (workers > 0) cfg.workers = workers;
      const fraclab::RunRecord rec = fraclab::run(cfg);
      print_run(rec);
      std::printf("record: %s/record.json\n", cfg.output_dir.c_str());
      return rec.all_pass() ? 0 : 1;
    }
    if (cmd_sweep->parsed()) {
      fraclab::ExperimentConfig cfg = load_config(config_path);
      if (workers > 0) cfg.workers = workers;
      const auto records = fraclab::sweep(cfg, axis, parse_values(values_csv));
      bool ok = true;
      for (const auto& rec : records) {
        print_run(rec);
        ok &= rec.all_pass();
      }
      fraclab::report(records, cfg.output_dir);
      std::printf("summary: %s/summary.csv\n", cfg.output_dir.c_str());
      return ok ? 0 : 1;
    }
    if (cmd_report->parsed()) {
      const auto records = fraclab::load_records(report_dir);
      if (records.empty()) {
        std::fprintf(stderr, "no record.json found under %s\n", report_dir.c_str());
        return 1;
      }
      fraclab::report(records, report_dir);
      std::printf("wrote %s/summary.csv (%zu records)\n", report_dir.c_str(),
                  records.size());
      return 0;
    }
    if (cmd_check->parsed()) {
      if (!check_all && criterion == 0) {
        std::fprintf(stderr, "check: pass --all or --criterion N\n");
        return 2;
      }
      const auto results = fraclab::run_acceptance(check_out, workers, criterion);
      return fraclab::print_acceptance(results) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
