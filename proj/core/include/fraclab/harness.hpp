#pragma once
//
// Named experiments, their configuration, persistence and reporting. Every
// run echoes its full configuration (defaults made explicit), records
// per-step diagnostics, fitted constants and pass/fail verdicts with
// margins, and persists the record as JSON before returning. Sweeps fan runs
// out over a worker pool; reports aggregate records into CSV/JSON tables.
//

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclab/atoms.hpp"
#include "fraclab/solver.hpp"
#include "fraclab/velocity.hpp"

namespace fraclab {

enum class ExperimentId {
  duality,
  conservation,
  energy_l2,
  cordoba,
  riccati,
  atom_propagation,
  regularization_rate,
  holder_propagation,
  supercritical,
  threshold_sweep,
  interpolation_bounds,
};

const char* to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);
std::vector<ExperimentId> all_experiments();

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::duality;
  GridSpec grid{1, 1024, 4.0};
  SolverConfig solver;
  VelocityModel velocity;
  AtomParams atom;            // atom.omega = 0 selects the per-alpha rule
  std::vector<double> radii{0.25, 0.125, 0.0625};
  double atom_radius = 0.125; // single-atom experiments
  double beta = 0.5;          // Holder exponent under test
  double q = 2.0;             // Lebesgue exponent of the data class
  int num_samples = 20;       // seeds for statistical criteria
  std::vector<double> sweep_strengths{0.4, 0.8, 1.2, 1.6}; // relative to S
  // > 0: rescale the compressive part (or the rough field) so that
  // ||(div v)_-||_{L^{d/alpha}} equals this fraction of the embedding
  // constant; 0 leaves the built field as-is.
  double sink_relative_to_s = 0.0;
  double window_scale = 1.2; // atom-propagation horizon in units of r^alpha
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int workers = 0; // 0: FRACLAB_WORKERS env var, else hardware concurrency

  nlohmann::json to_json() const;                       // every field explicit
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Tuned defaults per experiment (grid sizes, velocity class, horizons).
ExperimentConfig default_config(ExperimentId id);

struct Verdict {
  std::string name;
  std::string status; // "pass" | "fail" | "skipped"
  double margin = 0.0;
  std::string detail;
};

struct RunRecord {
  nlohmann::json config;      // echoed configuration
  nlohmann::json diagnostics; // series and scalar observations
  nlohmann::json fitted;      // delta, K, beta, S, c, exponents ...
  std::vector<Verdict> verdicts;
  double wallclock_ms = 0.0;
  std::size_t steps = 0;

  bool all_pass() const;
  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

// Runs the experiment, persists <output_dir>/record.json before returning.
// Solver blow-ups and experiment errors become fail verdicts, not crashes.
RunRecord run(const ExperimentConfig& config);

// One run per value of the named parameter (e.g. "alpha", "grid.n",
// "velocity.sink_strength"); records land incrementally in numbered
// subdirectories of the base output_dir. Fan-out respects worker count.
std::vector<RunRecord> sweep(const ExperimentConfig& base, const std::string& axis,
                             const std::vector<double>& values);

// Aggregated summary.csv (RFC-4180) and summary.json; wall-clock is the last
// CSV column so byte-level reproducibility can exclude it.
void report(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

// Load every record.json below `dir` (recursive, sorted by path).
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

int worker_count(int requested);

} // namespace fraclab
