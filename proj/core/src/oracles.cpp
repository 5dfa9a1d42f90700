#include "fraclab/oracles.hpp"

#include <complex>

#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

// Periodized kernel weights for displacement r on the grid: the cell-averaged
// kernel (1/h^d) int_cell |z|^{-(d+alpha)} dz summed over +-images periodic
// copies, diagonal cell excluded. Cell averaging keeps the quadrature honest
// near the singularity; in 1d the cell integral is exact, in 2d the near
// cells are subsampled.
std::vector<double> periodized_weights(const GridSpec& g, double alpha, int images) {
  const double h = g.spacing();
  const double L = g.length;
  const double power = g.dim + alpha;
  std::vector<double> w(g.size(), 0.0);
  if (g.dim == 1) {
    // (1/h) int_a^b z^{-(1+alpha)} dz = (a^-alpha - b^-alpha) / (alpha h), 0 < a < b
    auto cell_avg = [&](double center) {
      const double a = std::fabs(center) - h / 2.0;
      const double b = std::fabs(center) + h / 2.0;
      return (std::pow(a, -alpha) - std::pow(b, -alpha)) / (alpha * h);
    };
    for (int r = 0; r < g.n; ++r) {
      double s = 0.0;
      for (int q = -images; q <= images; ++q) {
        const double z = r * h + q * L;
        if (z == 0.0) continue;
        s += cell_avg(z);
      }
      // remainder of the image sum beyond +-images, integrated in closed form
      const double xp = r * h + (images + 0.5) * L;
      const double xm = -r * h + (images + 0.5) * L;
      s += (std::pow(xp, -alpha) + std::pow(xm, -alpha)) / (alpha * L);
      w[r] = s;
    }
  } else {
    const int sub = 16; // subsampling of near cells
    auto cell_avg_2d = [&](double c0, double c1) {
      // cells within 3h of the origin get subsampled, the rest use midpoint
      if (std::max(std::fabs(c0), std::fabs(c1)) <= 3.0 * h + 1e-12) {
        double s = 0.0;
        for (int a = 0; a < sub; ++a) {
          for (int b = 0; b < sub; ++b) {
            const double z0 = c0 + (a + 0.5) * h / sub - h / 2.0;
            const double z1 = c1 + (b + 0.5) * h / sub - h / 2.0;
            const double rr = z0 * z0 + z1 * z1;
            if (rr == 0.0) continue;
            s += 1.0 / std::pow(rr, power / 2.0);
          }
        }
        return s / (sub * sub);
      }
      const double rr = c0 * c0 + c1 * c1;
      return 1.0 / std::pow(rr, power / 2.0);
    };
    std::size_t idx = 0;
    for (int r0 = 0; r0 < g.n; ++r0) {
      for (int r1 = 0; r1 < g.n; ++r1, ++idx) {
        double s = 0.0;
        for (int q0 = -images; q0 <= images; ++q0) {
          for (int q1 = -images; q1 <= images; ++q1) {
            const double z0 = r0 * h + q0 * L;
            const double z1 = r1 * h + q1 * L;
            if (z0 == 0.0 && z1 == 0.0) continue;
            s += cell_avg_2d(z0, z1);
          }
        }
        // radial closed-form remainder outside the summed image block
        const double R = (images + 0.5) * L;
        s += (2.0 * M_PI / alpha) * std::pow(R, -alpha) / (L * L);
        w[idx] = s;
      }
    }
  }
  return w;
}

// Symbol of the (unnormalized) kernel operator on the mode with integer
// frequencies mvec: -h^d sum_r w(r) (cos(k.x_r) - 1) > 0.
double kernel_symbol(const GridSpec& g, const std::vector<double>& w,
                     const std::array<int, 2>& mvec) {
  const double h = g.spacing();
  const double two_pi_over_L = 2.0 * M_PI / g.length;
  double s = 0.0;
  if (g.dim == 1) {
    const double k = two_pi_over_L * mvec[0];
    for (int r = 0; r < g.n; ++r) s += w[r] * (std::cos(k * r * h) - 1.0);
  } else {
    const double k0 = two_pi_over_L * mvec[0];
    const double k1 = two_pi_over_L * mvec[1];
    std::size_t idx = 0;
    for (int r0 = 0; r0 < g.n; ++r0)
      for (int r1 = 0; r1 < g.n; ++r1, ++idx)
        s += w[idx] * (std::cos(k0 * r0 * h + k1 * r1 * h) - 1.0);
  }
  return -s * g.cell_volume();
}

} // namespace

ScalarField kernel_fractional_laplacian(const ScalarField& field, double alpha,
                                        int images) {
  const GridSpec& g = field.grid;
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("kernel_fractional_laplacian: alpha must lie in (0,2)");
  if (g.n > 64)
    throw std::invalid_argument("kernel_fractional_laplacian: n > 64 (O(n^{2d}) cost)");
  if (images < 1) throw std::invalid_argument("kernel_fractional_laplacian: images >= 1");

  const std::vector<double> w = periodized_weights(g, alpha, images);

  // Normalize against the lowest mode.
  const double target = std::pow(2.0 * M_PI / g.length, alpha);
  const double lam = kernel_symbol(g, w, {1, 0});
  const double c = target / lam;

  // out(x) = -c h^d sum_{y != x} (f(y) - f(x)) w(y - x)
  ScalarField out(g);
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        const int r = (j - i + n) % n;
        s += (field[j] - field[i]) * w[r];
      }
      out[i] = -c * s * g.cell_volume();
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0) {
      for (int i1 = 0; i1 < n; ++i1) {
        double s = 0.0;
        const double fi = field.at(i0, i1);
        for (int j0 = 0; j0 < n; ++j0) {
          const int r0 = (j0 - i0 + n) % n;
          for (int j1 = 0; j1 < n; ++j1) {
            const int r1 = (j1 - i1 + n) % n;
            s += (field.at(j0, j1) - fi) * w[static_cast<std::size_t>(r0) * n + r1];
          }
        }
        out.at(i0, i1) = -c * s * g.cell_volume();
      }
    }
  }
  return out;
}

ScalarField exact_translation(const ScalarField& field, const Position& shift) {
  SpectralField spec = forward(field);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = wavevector(spec.grid, i);
    const double phase = -(k[0] * shift[0] + k[1] * shift[1]);
    spec[i] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return inverse(spec);
}

} // namespace fraclab
