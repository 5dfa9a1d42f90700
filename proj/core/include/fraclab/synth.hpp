#pragma once
//
// Deterministic synthetic data menu shared by tests and experiments:
// band-limited random fields with a Gaussian spectral envelope (smooth),
// power-law spectra with random phases (rough), and mollified steps.
// Same grid + same seed => bit-identical field.
//

#include <cstdint>

#include "fraclab/grid.hpp"

namespace fraclab {

// Random real field whose spectrum is supported on |m_i| <= cutoff with a
// Gaussian envelope exp(-(|m|/(cutoff/2))^2); mean-zero, sup-norm ~ 1.
ScalarField random_smooth_field(const GridSpec& grid, std::uint64_t seed, int cutoff);

// Random real field with amplitudes |m|^{-decay} and random phases over the
// full (dealiased) band; mean-zero, normalized to unit L2 norm.
ScalarField random_power_spectrum_field(const GridSpec& grid, std::uint64_t seed,
                                        double decay);

// Multiscale bump train: one compact bump per scale, widths
// base_width * width_ratio^{-j} for j < levels, amplitudes w_j^{-d/2} (up to
// seeded jitter) so every scale carries comparable L2 mass while the sup
// saturates the Bernstein ratio. This is the rough-but-concentrated data
// that realizes the worst-case smoothing rates; random-phase spectra are too
// flat to. Normalized to unit L2 norm; the finest width must stay >= 4h.
ScalarField multiscale_bump_field(const GridSpec& grid, std::uint64_t seed, int levels,
                                  double base_width, double width_ratio = 2.0);

// Smooth indicator-like step: value ~1 inside the periodic ball of the given
// radius, ~0 outside, with an edge mollified over `edge_width`.
ScalarField mollified_step(const GridSpec& grid, const Position& center, double radius,
                           double edge_width);

// f - min(f): nonnegative with zero minimum, preserving smoothness.
ScalarField positivized(const ScalarField& f);

// f - mean(f)
ScalarField mean_free(const ScalarField& f);

} // namespace fraclab
