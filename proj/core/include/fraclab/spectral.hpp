#pragma once
//
// Discrete Fourier machinery on the periodic grid: transforms, the
// fractional Laplacian as a spectral multiplier, the exact fractional heat
// semigroup, 2/3-rule dealiasing and Sobolev seminorms.
//
// Conventions (fixed once, tested by round-trip):
//   * forward transform is unnormalized,  f_hat(m) = sum_j f_j e^{-i k_m.x_j};
//     the inverse carries the 1/n^d factor.
//   * integer modes m live in [-n/2, n/2) per axis, stored in standard FFT
//     order (m = idx for idx < n/2, idx - n otherwise).
//   * physical wavenumber k = 2*pi*m/L, except that the Nyquist row
//     m = -n/2 carries k = 0 in every multiplier, which keeps derivative
//     operators skew-symmetric. Multipliers built from |k| therefore act as
//     the identity factor on that row in exp(-t|k|^alpha) and annihilate it
//     in |k|^alpha.
//
// All operations are pure: inputs are taken by const reference and results
// returned by value, so distinct fields can be processed concurrently.
//

#include <complex>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coeff; // n^d entries, FFT order per axis

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g) : grid(g), coeff(g.size()) {}

  std::complex<double>& operator[](std::size_t i) { return coeff[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return coeff[i]; }
  std::size_t size() const { return coeff.size(); }
};

// Integer mode of a 1-d FFT index
inline int fft_mode(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

// Wavenumber component with the Nyquist row zeroed
inline double wavenumber(int idx, int n, double length) {
  const int m = fft_mode(idx, n);
  if (m == -n / 2) return 0.0;
  return 2.0 * M_PI * m / length;
}

// Integer modes (m0[,m1]) of a flat spectral index
inline std::array<int, 2> modes_of_index(const GridSpec& g, std::size_t idx) {
  if (g.dim == 1) return {fft_mode(static_cast<int>(idx), g.n), 0};
  const int n = g.n;
  return {fft_mode(static_cast<int>(idx) / n, n), fft_mode(static_cast<int>(idx) % n, n)};
}

// Wavenumber vector (Nyquist-zeroed) of a flat spectral index
inline std::array<double, 2> wavevector(const GridSpec& g, std::size_t idx) {
  if (g.dim == 1) return {wavenumber(static_cast<int>(idx), g.n, g.length), 0.0};
  const int n = g.n;
  return {wavenumber(static_cast<int>(idx) / n, n, g.length),
          wavenumber(static_cast<int>(idx) % n, n, g.length)};
}

SpectralField forward(const ScalarField& field);
ScalarField inverse(const SpectralField& spec);

// Largest relative imaginary residue of the inverse transform; diagnostic
// for the Hermitian-symmetry invariant.
double inverse_imag_residual(const SpectralField& spec);

// (-Laplace)^{alpha/2} as the multiplier |k|^alpha, alpha in (0,2].
// The mean (m=0) and the Nyquist rows are annihilated.
ScalarField fractional_laplacian(const ScalarField& field, double alpha);

// Exact flow of d_t f + (-Laplace)^{alpha/2} f = 0 over time t >= 0.
ScalarField diffusion_semigroup(const ScalarField& field, double alpha, double t);

// 2/3-rule: zero every coefficient with 3*|m_i| >= n on any axis. Idempotent.
SpectralField dealias(const SpectralField& spec);
ScalarField dealias(const ScalarField& field);

// integral |(-Laplace)^{h/2} f|^2 = L^d n^{-2d} sum |k|^{2h} |f_hat|^2, h > 0.
double sobolev_seminorm(const ScalarField& field, double h);

// Parseval inner product: equals the quadrature of f*g for real fields.
double spectral_inner(const SpectralField& f, const SpectralField& g);

// Spectral partial derivative along `axis` (i k_axis multiplier,
// skew-symmetric thanks to the zeroed Nyquist row).
ScalarField partial_derivative(const ScalarField& field, int axis);

// Solve Laplace(phi) = rhs for the mean-free potential phi (spectral).
ScalarField poisson_solve(const ScalarField& rhs);

} // namespace fraclab
