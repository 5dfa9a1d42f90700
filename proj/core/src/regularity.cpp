#include "fraclab/regularity.hpp"

namespace fraclab {

AtomDictionary build_dictionary(const GridSpec& grid, const AtomParams& params,
                                int num_radii, int num_centers, std::uint64_t seed) {
  grid.validate();
  params.validate();
  if (num_radii < 1 || num_centers < 1)
    throw std::invalid_argument("build_dictionary: need at least one radius and center");

  AtomDictionary dict;
  dict.p = params.p;

  // centers on a coarse lattice; 1-d row or the smallest square lattice
  // covering num_centers in 2-d
  std::vector<Position> centers;
  if (grid.dim == 1) {
    for (int i = 0; i < num_centers; ++i)
      centers.push_back({grid.length * (i + 0.5) / num_centers, 0.0});
  } else {
    const int side = static_cast<int>(std::ceil(std::sqrt(double(num_centers))));
    for (int i = 0; i < side && static_cast<int>(centers.size()) < num_centers; ++i)
      for (int j = 0; j < side && static_cast<int>(centers.size()) < num_centers; ++j)
        centers.push_back({grid.length * (i + 0.5) / side, grid.length * (j + 0.5) / side});
  }

  const double h = grid.spacing();
  for (int j = 1; j <= num_radii; ++j) {
    const double r = std::pow(2.0, -j);
    if (r < 8.0 * h) break; // resolvability cap
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      dict.atoms.push_back(build_canonical_atom(grid, r, params, centers[ci]));
      dict.atoms.push_back(build_random_atom(
          grid, r, params, seed + 7919u * (j * centers.size() + ci), centers[ci]));
    }
  }
  if (dict.atoms.empty())
    throw std::invalid_argument("build_dictionary: no resolvable radii on this grid");
  return dict;
}

double holder_atomic(const ScalarField& f, double beta, const AtomDictionary& dict) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("holder_atomic: beta must lie in (0,1)");
  if (dict.atoms.empty()) throw std::invalid_argument("holder_atomic: empty dictionary");
  double best = 0.0;
  for (const Atom& atom : dict.atoms) {
    const double v = std::pow(atom.r, -beta) * std::fabs(inner(f, atom.field));
    best = std::max(best, v);
  }
  return best;
}

HolderEstimate holder_direct(const ScalarField& f, double beta) {
  return holder_norm(f, beta);
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 5)
    throw std::invalid_argument("fit_power_law: need at least 5 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  const double n = static_cast<double>(series.size());
  for (const auto& [t, v] : series) {
    if (!(t > 0.0) || !(v > 0.0))
      throw std::invalid_argument("fit_power_law: nonpositive data");
    const double x = std::log(t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_power_law: degenerate abscissas");
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / den;
  fit.log_prefactor = (sy - fit.exponent * sx) / n;
  double ss_res = 0.0;
  const double ybar = sy / n;
  double ss_tot = 0.0;
  for (const auto& [t, v] : series) {
    const double y = std::log(v);
    const double yhat = fit.log_prefactor + fit.exponent * std::log(t);
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

} // namespace fraclab
