#pragma once
//
// The acceptance suite: one entry per quantitative criterion, each wired to
// the experiment runs that exercise it at its stated tolerance. Used by the
// CLI (`check --all`) and by the acceptance test binary.
//

#include <filesystem>
#include <string>
#include <vector>

namespace fraclab {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every criterion, persisting run records under `outdir`. `only` (when
// nonzero) restricts to a single criterion index, for development.
std::vector<CriterionResult> run_acceptance(const std::filesystem::path& outdir,
                                            int workers = 0, int only = 0);

// Prints one pass/fail line per criterion; returns true iff all passed.
bool print_acceptance(const std::vector<CriterionResult>& results);

} // namespace fraclab
