#include "fraclab/synth.hpp"

#include <random>

#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

// Fill Hermitian-symmetric coefficients from per-mode (amplitude, phase).
// Only modes with every |m_i| < n/2 are touched so the result is exactly the
// real part structure required for a real field.
template <typename AmpFn>
ScalarField synth_from_spectrum(const GridSpec& grid, std::uint64_t seed, AmpFn&& amp) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

  SpectralField spec(grid);
  const int n = grid.n;
  const double nd = static_cast<double>(grid.size());

  auto index_of = [&](int m0, int m1) -> std::size_t {
    const int i0 = (m0 + n) % n;
    if (grid.dim == 1) return static_cast<std::size_t>(i0);
    const int i1 = (m1 + n) % n;
    return static_cast<std::size_t>(i0) * n + i1;
  };

  if (grid.dim == 1) {
    for (int m = 1; m < n / 2; ++m) {
      const double a = amp(m, 0);
      if (a == 0.0) continue;
      const double ph = phase(rng);
      const std::complex<double> z = 0.5 * a * nd * std::polar(1.0, ph);
      spec[index_of(m, 0)] = z;
      spec[index_of(-m, 0)] = std::conj(z);
    }
  } else {
    // Pair (m0,m1) with (-m0,-m1); enumerate a half-space deterministically.
    for (int m0 = -(n / 2 - 1); m0 < n / 2; ++m0) {
      for (int m1 = -(n / 2 - 1); m1 < n / 2; ++m1) {
        if (m0 == 0 && m1 == 0) continue;
        if (m0 < 0 || (m0 == 0 && m1 < 0)) continue; // half-space representative
        const double a = amp(m0, m1);
        if (a == 0.0) continue;
        const double ph = phase(rng);
        const std::complex<double> z = 0.5 * a * nd * std::polar(1.0, ph);
        spec[index_of(m0, m1)] = z;
        spec[index_of(-m0, -m1)] = std::conj(z);
      }
    }
  }
  return inverse(spec);
}

} // namespace

ScalarField random_smooth_field(const GridSpec& grid, std::uint64_t seed, int cutoff) {
  grid.validate();
  if (cutoff < 1 || cutoff >= grid.n / 2)
    throw std::invalid_argument("random_smooth_field: cutoff out of range");
  const double w = cutoff / 2.0;
  ScalarField f = synth_from_spectrum(grid, seed, [&](int m0, int m1) {
    const double mm = std::sqrt(double(m0) * m0 + double(m1) * m1);
    if (m0 > cutoff || std::abs(m1) > cutoff) return 0.0;
    return std::exp(-(mm / w) * (mm / w));
  });
  const double s = sup_norm(f);
  if (s > 0.0) f *= 1.0 / s;
  return f;
}

ScalarField random_power_spectrum_field(const GridSpec& grid, std::uint64_t seed,
                                        double decay) {
  grid.validate();
  const int band = grid.n / 3; // stay clear of the dealiasing cut
  ScalarField f = synth_from_spectrum(grid, seed, [&](int m0, int m1) {
    const double mm = std::sqrt(double(m0) * m0 + double(m1) * m1);
    if (mm > band) return 0.0;
    return std::pow(mm, -decay);
  });
  const double s = lp_norm(f, 2.0);
  if (s > 0.0) f *= 1.0 / s;
  return f;
}

ScalarField multiscale_bump_field(const GridSpec& grid, std::uint64_t seed, int levels,
                                  double base_width, double width_ratio) {
  grid.validate();
  if (levels < 1) throw std::invalid_argument("multiscale_bump_field: levels >= 1");
  if (!(width_ratio > 1.0))
    throw std::invalid_argument("multiscale_bump_field: width_ratio > 1");
  const double finest = base_width * std::pow(width_ratio, -(levels - 1));
  if (finest < 4.0 * grid.spacing())
    throw std::invalid_argument("multiscale_bump_field: finest width under-resolved");

  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double golden = 0.6180339887498949;
  const double off0 = unit(rng), off1 = unit(rng);

  ScalarField out(grid);
  for (int j = 0; j < levels; ++j) {
    const double w = base_width * std::pow(width_ratio, -j);
    // low-discrepancy placement keeps the scales apart
    const Position c{std::fmod(off0 + golden * (j + 1), 1.0) * grid.length,
                     std::fmod(off1 + golden * golden * (j + 1), 1.0) * grid.length};
    const double amp = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.9 + 0.2 * unit(rng)) *
                       std::pow(w / base_width, -0.5 * grid.dim);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double u = periodic_distance(grid, node_position(grid, i), c) / w;
      if (u < 1.0) out[i] += amp * std::exp(-1.0 / (1.0 - u * u));
    }
  }
  const double n2 = lp_norm(out, 2.0);
  if (n2 > 0.0) out *= 1.0 / n2;
  return out;
}

ScalarField mollified_step(const GridSpec& grid, const Position& center, double radius,
                           double edge_width) {
  if (!(radius > 0.0) || !(edge_width > 0.0))
    throw std::invalid_argument("mollified_step: radius and edge_width must be positive");
  return sample(grid, [&](const Position& x) {
    const double d = periodic_distance(grid, x, center);
    // quintic smoothstep on the edge band [radius - w, radius + w]
    const double u = std::clamp((radius + edge_width - d) / (2.0 * edge_width), 0.0, 1.0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  });
}

ScalarField positivized(const ScalarField& f) {
  ScalarField out = f;
  const double m = min_value(f);
  for (double& v : out.values) v -= m;
  return out;
}

ScalarField mean_free(const ScalarField& f) {
  ScalarField out = f;
  const double m = mean(f);
  for (double& v : out.values) v -= m;
  return out;
}

} // namespace fraclab
