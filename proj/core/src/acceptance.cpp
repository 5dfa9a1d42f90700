#include "fraclab/acceptance.hpp"

#include <chrono>
#include <cstdio>

#include "fraclab/harness.hpp"

namespace fraclab {

namespace {

std::string verdict_summary(const RunRecord& rec) {
  std::string s;
  for (const auto& v : rec.verdicts) {
    if (!s.empty()) s += "; ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "=%.3g", v.margin);
    s += v.name + ":" + v.status + buf;
  }
  return s;
}

bool runs_pass(const std::vector<RunRecord>& recs) {
  for (const auto& r : recs)
    if (!r.all_pass()) return false;
  return true;
}

std::string join_summaries(const std::vector<RunRecord>& recs) {
  std::string s;
  for (const auto& r : recs) {
    if (!s.empty()) s += " | ";
    s += verdict_summary(r);
  }
  return s;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::filesystem::path& outdir,
                                            int workers, int only) {
  std::vector<CriterionResult> results;

  auto timed = [&](int index, const std::string& name, auto&& body) {
    if (only != 0 && only != index) return;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    res.index = index;
    res.name = name;
    try {
      const std::vector<RunRecord> recs = body();
      res.pass = runs_pass(recs);
      res.detail = join_summaries(recs);
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(res));
  };

  auto based = [&](ExperimentId id, const std::string& sub) {
    ExperimentConfig cfg = default_config(id);
    cfg.output_dir = (outdir / sub).string();
    cfg.workers = workers;
    return cfg;
  };

  timed(1, "duality identity", [&] {
    ExperimentConfig cfg = based(ExperimentId::duality, "c1_duality");
    std::vector<RunRecord> recs{run(cfg)};
    // the criterion carries its own runtime budget
    RunRecord& r = recs.back();
    const bool in_budget = r.wallclock_ms <= 30e3;
    r.verdicts.push_back({"runtime_30s", in_budget ? "pass" : "fail",
                          30e3 - r.wallclock_ms, "wallclock budget"});
    return recs;
  });

  timed(2, "conservation and positivity", [&] {
    return std::vector<RunRecord>{run(based(ExperimentId::conservation, "c2_conservation"))};
  });

  timed(3, "L2 energy inequality + threshold sweep", [&] {
    std::vector<RunRecord> recs;
    recs.push_back(run(based(ExperimentId::energy_l2, "c3_energy")));
    recs.push_back(run(based(ExperimentId::threshold_sweep, "c3_threshold")));
    return recs;
  });

  timed(4, "Cordoba pointwise inequality", [&] {
    return std::vector<RunRecord>{run(based(ExperimentId::cordoba, "c4_cordoba"))};
  });

  timed(5, "Riccati envelope", [&] {
    return std::vector<RunRecord>{run(based(ExperimentId::riccati, "c5_riccati"))};
  });

  timed(6, "atom propagation", [&] {
    std::vector<RunRecord> recs;
    int idx = 0;
    for (double alpha : {1.0, 1.5}) {
      for (VelocityKind kind : {VelocityKind::divergence_free, VelocityKind::composite}) {
        ExperimentConfig cfg = based(ExperimentId::atom_propagation,
                                     "c6_atom_propagation/run_" + std::to_string(idx++));
        cfg.solver.alpha = alpha;
        cfg.velocity.kind = kind;
        if (kind == VelocityKind::composite) cfg.velocity.sink_strength = 1.0;
        recs.push_back(run(cfg));
      }
    }
    return recs;
  });

  timed(7, "regularization rate", [&] {
    return std::vector<RunRecord>{
        run(based(ExperimentId::regularization_rate, "c7_regularization"))};
  });

  timed(8, "Holder propagation", [&] {
    return std::vector<RunRecord>{
        run(based(ExperimentId::holder_propagation, "c8_holder_propagation"))};
  });

  timed(9, "supercritical mode", [&] {
    return std::vector<RunRecord>{run(based(ExperimentId::supercritical, "c9_supercritical"))};
  });

  timed(10, "interpolation bounds", [&] {
    return std::vector<RunRecord>{
        run(based(ExperimentId::interpolation_bounds, "c10_interpolation"))};
  });

  return results;
}

bool print_acceptance(const std::vector<CriterionResult>& results) {
  bool all = true;
  double total = 0.0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %-40s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.index,
                r.name.c_str(), r.seconds);
    if (!r.pass) std::printf("       %s\n", r.detail.c_str());
    all &= r.pass;
    total += r.seconds;
  }
  std::printf("%s: %zu criteria, %.1fs total\n", all ? "ALL PASS" : "FAILURES PRESENT",
              results.size(), total);
  return all;
}

} // namespace fraclab
