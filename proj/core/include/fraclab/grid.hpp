#pragma once
//
// Uniform periodic grid on the torus [0,L)^d (d = 1 or 2) and real sampled
// fields living on it. Values are stored row-major over axes: for d=2 the
// node (i,j) sits at index i*n + j, at position (i*h, j*h).
//
// All integrals below are rectangle-rule quadratures h^d * sum(...), which
// are exact for trigonometric polynomials resolved by the grid.
//

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

// Position on the torus; only the first `dim` entries are meaningful.
using Position = std::array<double, 2>;

struct GridSpec {
  int dim = 1;         // spatial dimension, 1 or 2
  int n = 8;           // points per axis, power of two, >= 8
  double length = 1.0; // physical box edge

  GridSpec() = default;
  GridSpec(int dim_, int n_, double length_) : dim(dim_), n(n_), length(length_) {
    validate();
  }

  void validate() const {
    if (dim != 1 && dim != 2)
      throw std::invalid_argument("GridSpec: dim must be 1 or 2");
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridSpec: n must be a power of two >= 8");
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("GridSpec: length must be positive");
  }

  double spacing() const { return length / n; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }
  double cell_volume() const { return std::pow(spacing(), dim); }
  double volume() const { return std::pow(length, dim); }

  bool operator==(const GridSpec&) const = default;
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  // d=2 accessor; (i,j) wrap periodically
  double& at(int i, int j) {
    const int n = grid.n;
    return values[static_cast<std::size_t>(((i % n + n) % n)) * n + ((j % n + n) % n)];
  }
  double at(int i, int j) const {
    const int n = grid.n;
    return values[static_cast<std::size_t>(((i % n + n) % n)) * n + ((j % n + n) % n)];
  }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

inline bool all_finite(const ScalarField& f) {
  return std::all_of(f.values.begin(), f.values.end(),
                     [](double x) { return std::isfinite(x); });
}

// Node position of flat index
inline Position node_position(const GridSpec& g, std::size_t idx) {
  const double h = g.spacing();
  if (g.dim == 1) return {static_cast<double>(idx) * h, 0.0};
  const std::size_t n = static_cast<std::size_t>(g.n);
  return {static_cast<double>(idx / n) * h, static_cast<double>(idx % n) * h};
}

// Minimal-image distance on the periodic box
inline double periodic_delta(double a, double b, double L) {
  double d = std::fabs(a - b);
  d -= L * std::floor(d / L);
  return std::min(d, L - d);
}

inline double periodic_distance(const GridSpec& g, const Position& a, const Position& b) {
  double s = 0.0;
  for (int ax = 0; ax < g.dim; ++ax) {
    const double d = periodic_delta(a[ax], b[ax], g.length);
    s += d * d;
  }
  return std::sqrt(s);
}

// --- quadrature and norms ------------------------------------------------

inline double integral(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

inline double mean(const ScalarField& f) { return integral(f) / f.grid.volume(); }

inline double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

inline double min_value(const ScalarField& f) {
  return *std::min_element(f.values.begin(), f.values.end());
}
inline double max_value(const ScalarField& f) {
  return *std::max_element(f.values.begin(), f.values.end());
}

// L^p norm with the quadrature measure; p may be infinity.
inline double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) return sup_norm(f);
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double s = 0.0;
  if (p == 1.0) {
    for (double v : f.values) s += std::fabs(v);
  } else if (p == 2.0) {
    for (double v : f.values) s += v * v;
  } else if (p == 4.0) {
    for (double v : f.values) s += (v * v) * (v * v);
  } else if (p == 8.0) {
    for (double v : f.values) {
      const double q = (v * v) * (v * v);
      s += q * q;
    }
  } else {
    for (double v : f.values) s += std::pow(std::fabs(v), p);
  }
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

inline double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid.cell_volume();
}

// x_+ = max(x,0), x_- = (-x)_+, so x = x_+ - x_- and |x| = x_+ + x_-.
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

inline ScalarField positive_part(const ScalarField& f) {
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = positive_part(f[i]);
  return out;
}
inline ScalarField negative_part(const ScalarField& f) {
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = negative_part(f[i]);
  return out;
}

// --- small field arithmetic ----------------------------------------------

inline ScalarField& operator+=(ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator+=");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
inline ScalarField& operator-=(ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator-=");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
inline ScalarField& operator*=(ScalarField& a, double c) {
  for (double& v : a.values) v *= c;
  return a;
}
inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(ScalarField a, double c) { return a *= c; }
inline ScalarField operator*(double c, ScalarField a) { return a *= c; }

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "pointwise_product");
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline ScalarField abs_field(const ScalarField& f) {
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::fabs(f[i]);
  return out;
}

// Evaluate a function of position on every node
template <typename F>
ScalarField sample(const GridSpec& g, F&& fn) {
  ScalarField out(g);
  const double h = g.spacing();
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) out.values[i] = fn(Position{i * h, 0.0});
  } else {
    std::size_t idx = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j, ++idx) out.values[idx] = fn(Position{i * h, j * h});
  }
  return out;
}

} // namespace fraclab
