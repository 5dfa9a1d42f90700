#pragma once
//
// Holder seminorm estimation two ways: against a fixed dictionary of atoms
// (sup of r^{-beta} |<f, phi>|, a lower bound of the continuum seminorm) and
// by direct differences (re-exported from the velocity estimators). Plus the
// log-log power-law fit used to verify decay rates.
//

#include <cstdint>
#include <vector>

#include "fraclab/atoms.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/velocity.hpp"

namespace fraclab {

struct AtomDictionary {
  std::vector<Atom> atoms; // dyadic radii, several centers, two profiles
  double p = 2.0;

  std::size_t size() const { return atoms.size(); }
};

// Dictionary over dyadic radii 2^{-1} .. 2^{-num_radii}, `num_centers`
// evenly spread centers per radius (a 1-d row or a 2-d lattice), canonical
// plus seeded random profiles. Every member has lambda <= 1 and the radius
// count is capped by resolvability (r >= 8h).
AtomDictionary build_dictionary(const GridSpec& grid, const AtomParams& params,
                                int num_radii = 5, int num_centers = 16,
                                std::uint64_t seed = 0);

// max over the dictionary of r^{-beta} |quadrature(f * phi)|.
double holder_atomic(const ScalarField& f, double beta, const AtomDictionary& dict);

// Direct-difference estimate; same contract as velocity_library's estimator.
HolderEstimate holder_direct(const ScalarField& f, double beta);

struct PowerLawFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double log_prefactor = 0.0;
};

// Least squares of log(value) against log(t); requires >= 5 points, all
// positive on both coordinates.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& series);

} // namespace fraclab
