#pragma once
//
// Advection-field constructors with controlled divergence sign and size,
// plus the norm estimators that gate the smallness hypotheses: the negative
// divergence in L^{d/alpha}, a dyadic-window BMO estimate, Holder seminorms
// by direct differences, and the discrete Sobolev embedding constant.
//

#include <cstdint>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

// Velocity on the grid; a static field has one snapshot. Time-dependent
// fields are stored as snapshots with uniform spacing and sampled by linear
// interpolation (the dual equation reads the field at reversed times t - s).
struct VectorField {
  GridSpec grid;
  std::vector<std::vector<ScalarField>> snapshots; // [time][component]
  double snapshot_dt = 0.0;

  VectorField() = default;
  VectorField(const GridSpec& g, std::vector<ScalarField> components)
      : grid(g), snapshots{std::move(components)} {
    validate();
  }
  VectorField(const GridSpec& g, std::vector<std::vector<ScalarField>> snaps, double dt)
      : grid(g), snapshots(std::move(snaps)), snapshot_dt(dt) {
    validate();
  }

  void validate() const;
  bool is_static() const { return snapshots.size() == 1; }
  double span() const {
    return snapshots.size() < 2 ? 0.0 : snapshot_dt * (snapshots.size() - 1);
  }
  const std::vector<ScalarField>& snapshot(std::size_t i) const { return snapshots.at(i); }

  // Linear interpolation in time, clamped to [0, span]
  std::vector<ScalarField> sample(double t) const;
};

enum class VelocityKind {
  divergence_free,
  compressive_sink,
  shear,
  rough_holder,
  composite,
};

const char* to_string(VelocityKind kind);
VelocityKind velocity_kind_from_string(const std::string& s);

struct VelocityModel {
  VelocityKind kind = VelocityKind::divergence_free;
  double amplitude = 1.0;     // target sup-norm of the constructed field
  double length_scale = 0.5;  // feature size (streamfunction band, sink radius)
  double sink_strength = 0.0; // mass of the prescribed negative divergence
  double holder_exponent = 0.5; // target exponent of rough_holder synthesis
  std::uint64_t seed = 0;
};

// Deterministic constructor: same model + grid => bit-identical field.
VectorField build_velocity(const VelocityModel& model, const GridSpec& grid);

// The mean-free divergence profile that compressive_sink / composite aim at;
// exposed so tests can verify the constructed field against it.
ScalarField sink_divergence_profile(const VelocityModel& model, const GridSpec& grid);

// Spectral divergence sum_i d_i v_i of one snapshot.
ScalarField divergence(const std::vector<ScalarField>& components);
ScalarField divergence(const VectorField& v, std::size_t snapshot = 0);

// || (div v)_- ||_{L^{d/alpha}}, maximized over snapshots. Requires d > alpha.
// Divergence values above -1e-10 are treated as nonnegative, so the norm is
// exactly zero iff the discrete divergence stays above that floor.
double neg_div_norm(const VectorField& v, double alpha);

// Dyadic-window BMO estimate: max over components and snapshots of the mean
// L^1 oscillation over all cubes of side L/2^j (j = 0 .. log2(n)-1) at every
// grid-aligned position. A lower bound of the true BMO norm, exactly
// invariant under cyclic grid shifts. Cost O(n^{2d}): fine in 1-d, intended
// for moderate grids in 2-d.
double bmo_norm(const ScalarField& f);
double bmo_norm(const VectorField& v);

struct HolderEstimate {
  double seminorm = 0.0;
  double sup = 0.0;
  double norm() const { return seminorm + sup; }
};

// Direct-difference Holder estimate over all offsets up to n/4 cells along
// axes and (in 2-d) diagonals, with the periodic offset distance.
HolderEstimate holder_norm(const ScalarField& f, double gamma);

// Smallest discrete Rayleigh quotient
//   sobolev_seminorm(f, alpha/2) / ||f||^2_{L^sigma}
// over mean-free fields, found by normalized projected gradient descent from
// `starts` seeded random starts plus structured starts. Deterministic.
double sobolev_quotient_min(const GridSpec& grid, double alpha, double sigma,
                            std::uint64_t seed = 0, int starts = 8);

// Embedding constant with sigma = 2d/(d - alpha); requires d > alpha.
double sobolev_constant(const GridSpec& grid, double alpha, std::uint64_t seed = 0,
                        int starts = 8);

// Largest per-axis sup speed over snapshots (CFL input).
double max_speed(const VectorField& v);

} // namespace fraclab
