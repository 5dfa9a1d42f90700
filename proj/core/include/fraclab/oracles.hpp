#pragma once
//
// Independent slow references used by tests and calibration: a periodized
// principal-value kernel form of the fractional Laplacian and an exact
// spectral translation. Not built for performance.
//

#include "fraclab/grid.hpp"

namespace fraclab {

// Principal-value kernel sum for (-Laplace)^{alpha/2}, alpha in (0,2), over
// all grid nodes plus +-`images` periodic copies per axis (diagonal node
// excluded). The kernel constant is not taken from a closed formula; it is
// normalized so the action on the lowest cosine mode matches the multiplier
// |2 pi / L|^alpha. Cost is O(n^{2d}); n is capped at 64.
ScalarField kernel_fractional_laplacian(const ScalarField& field, double alpha,
                                        int images = 10);

// f(x - shift) via phase shift in spectral space; exact for band-limited
// fields (the Nyquist row is left untouched).
ScalarField exact_translation(const ScalarField& field, const Position& shift);

} // namespace fraclab
