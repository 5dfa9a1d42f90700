#include "fraclab/velocity.hpp"

#include <random>

#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"

namespace fraclab {

void VectorField::validate() const {
  grid.validate();
  if (snapshots.empty()) throw std::invalid_argument("VectorField: no snapshots");
  for (const auto& snap : snapshots) {
    if (static_cast<int>(snap.size()) != grid.dim)
      throw std::invalid_argument("VectorField: component count != dim");
    for (const auto& c : snap) require_same_grid(c.grid, grid, "VectorField");
  }
  if (snapshots.size() > 1 && !(snapshot_dt > 0.0))
    throw std::invalid_argument("VectorField: snapshot_dt must be positive");
}

std::vector<ScalarField> VectorField::sample(double t) const {
  if (snapshots.size() == 1) return snapshots.front();
  const double s = std::clamp(t / snapshot_dt, 0.0, double(snapshots.size() - 1));
  const std::size_t i0 = std::min(static_cast<std::size_t>(s), snapshots.size() - 2);
  const double w = s - static_cast<double>(i0);
  std::vector<ScalarField> out = snapshots[i0];
  for (int c = 0; c < grid.dim; ++c) {
    const auto& hi = snapshots[i0 + 1][c];
    for (std::size_t i = 0; i < out[c].size(); ++i)
      out[c][i] = (1.0 - w) * out[c][i] + w * hi[i];
  }
  return out;
}

const char* to_string(VelocityKind kind) {
  switch (kind) {
    case VelocityKind::divergence_free: return "divergence_free";
    case VelocityKind::compressive_sink: return "compressive_sink";
    case VelocityKind::shear: return "shear";
    case VelocityKind::rough_holder: return "rough_holder";
    case VelocityKind::composite: return "composite";
  }
  return "?";
}

VelocityKind velocity_kind_from_string(const std::string& s) {
  if (s == "divergence_free") return VelocityKind::divergence_free;
  if (s == "compressive_sink") return VelocityKind::compressive_sink;
  if (s == "shear") return VelocityKind::shear;
  if (s == "rough_holder") return VelocityKind::rough_holder;
  if (s == "composite") return VelocityKind::composite;
  throw std::invalid_argument("unknown velocity kind: " + s);
}

namespace {

int band_of_length_scale(const GridSpec& g, double length_scale) {
  const int band = static_cast<int>(std::lround(g.length / std::max(length_scale, 1e-9)));
  return std::clamp(band, 1, g.n / 3 - 1);
}

std::vector<ScalarField> perp_gradient(const ScalarField& stream) {
  // (-d_1 phi, d_0 phi): divergence vanishes identically in spectral space
  std::vector<ScalarField> v;
  v.push_back(partial_derivative(stream, 1) * (-1.0));
  v.push_back(partial_derivative(stream, 0));
  return v;
}

void rescale_to_amplitude(std::vector<ScalarField>& comps, double amplitude) {
  double m = 0.0;
  for (const auto& c : comps) m = std::max(m, sup_norm(c));
  if (m > 0.0) {
    for (auto& c : comps) c *= amplitude / m;
  }
}

std::vector<ScalarField> build_components(const VelocityModel& model, const GridSpec& g) {
  switch (model.kind) {
    case VelocityKind::divergence_free: {
      if (g.dim == 1) return {sample(g, [&](const Position&) { return model.amplitude; })};
      const int band = band_of_length_scale(g, model.length_scale);
      ScalarField stream = random_smooth_field(g, model.seed, std::max(band, 2));
      auto v = perp_gradient(stream);
      rescale_to_amplitude(v, model.amplitude);
      return v;
    }
    case VelocityKind::shear: {
      if (g.dim == 1)
        throw std::invalid_argument("build_velocity: shear requires dim = 2");
      const double k = 2.0 * M_PI / g.length;
      ScalarField vx = sample(g, [&](const Position& x) {
        return model.amplitude * std::sin(k * x[1]);
      });
      return {vx, ScalarField(g)};
    }
    case VelocityKind::compressive_sink: {
      ScalarField phi = poisson_solve(sink_divergence_profile(model, g));
      std::vector<ScalarField> v;
      for (int a = 0; a < g.dim; ++a) v.push_back(partial_derivative(phi, a));
      return v;
    }
    case VelocityKind::rough_holder: {
      const double gamma = model.holder_exponent;
      if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("build_velocity: rough_holder exponent in (0,1)");
      std::vector<ScalarField> v;
      for (int a = 0; a < g.dim; ++a) {
        ScalarField c = random_power_spectrum_field(g, model.seed + 0x51ed2700u * (a + 1),
                                                    g.dim / 2.0 + gamma);
        v.push_back(c);
      }
      rescale_to_amplitude(v, model.amplitude);
      return v;
    }
    case VelocityKind::composite: {
      VelocityModel df = model;
      df.kind = VelocityKind::divergence_free;
      auto v = build_components(df, g);
      VelocityModel sink = model;
      sink.kind = VelocityKind::compressive_sink;
      auto vs = build_components(sink, g);
      for (int a = 0; a < g.dim; ++a) v[a] += vs[a];
      return v;
    }
  }
  throw std::logic_error("build_velocity: unhandled kind");
}

} // namespace

ScalarField sink_divergence_profile(const VelocityModel& model, const GridSpec& grid) {
  const Position center{grid.length / 2.0, grid.length / 2.0};
  const double radius = std::clamp(model.length_scale, 4.0 * grid.spacing(),
                                   grid.length / 4.0);
  ScalarField bump = mollified_step(grid, center, radius, radius / 2.0);
  const double m = integral(bump);
  if (m > 0.0) bump *= 1.0 / m; // unit mass before mean removal
  bump = mean_free(bump);
  // keep the profile clean of the dealiased band so the gradient-potential
  // construction reproduces it to round-off
  bump = dealias(bump);
  return bump * (-model.sink_strength);
}

VectorField build_velocity(const VelocityModel& model, const GridSpec& grid) {
  grid.validate();
  return VectorField(grid, build_components(model, grid));
}

ScalarField divergence(const std::vector<ScalarField>& components) {
  if (components.empty()) throw std::invalid_argument("divergence: no components");
  ScalarField out = partial_derivative(components[0], 0);
  for (std::size_t a = 1; a < components.size(); ++a)
    out += partial_derivative(components[a], static_cast<int>(a));
  return out;
}

ScalarField divergence(const VectorField& v, std::size_t snapshot) {
  return divergence(v.snapshot(snapshot));
}

double neg_div_norm(const VectorField& v, double alpha) {
  const int d = v.grid.dim;
  if (!(d > alpha)) throw std::invalid_argument("neg_div_norm: requires d > alpha");
  const double p = d / alpha;
  double worst = 0.0;
  for (std::size_t s = 0; s < v.snapshots.size(); ++s) {
    const ScalarField div = divergence(v, s);
    double acc = 0.0;
    // divergence values above the -1e-10 noise floor count as nonnegative,
    // so spectrally divergence-free constructions report exactly zero
    for (double x : div.values)
      if (x < -1e-10) acc += std::pow(-x, p);
    worst = std::max(worst, std::pow(acc * v.grid.cell_volume(), 1.0 / p));
  }
  return worst;
}

namespace {

// Mean L^1 oscillation maximized over every window of `w` cells per axis at
// every start. Windows are enumerated in the same relative order for every
// start, so a cyclic shift of the data permutes the window values without
// changing any of them.
double bmo_level_1d(const ScalarField& f, int w) {
  const int n = f.grid.n;
  double worst = 0.0;
  for (int p = 0; p < n; ++p) {
    double sum = 0.0;
    for (int i = 0; i < w; ++i) sum += f[(p + i) % n];
    const double mu = sum / w;
    double osc = 0.0;
    for (int i = 0; i < w; ++i) osc += std::fabs(f[(p + i) % n] - mu);
    worst = std::max(worst, osc / w);
  }
  return worst;
}

double bmo_level_2d(const ScalarField& f, int w) {
  const int n = f.grid.n;
  const double cells = static_cast<double>(w) * w;
  double worst = 0.0;
  for (int p0 = 0; p0 < n; ++p0) {
    for (int p1 = 0; p1 < n; ++p1) {
      double sum = 0.0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) sum += f.at(p0 + i, p1 + j);
      const double mu = sum / cells;
      double osc = 0.0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) osc += std::fabs(f.at(p0 + i, p1 + j) - mu);
      worst = std::max(worst, osc / cells);
    }
  }
  return worst;
}

} // namespace

double bmo_norm(const ScalarField& f) {
  double worst = 0.0;
  for (int w = f.grid.n; w >= 2; w /= 2) {
    worst = std::max(worst, f.grid.dim == 1 ? bmo_level_1d(f, w) : bmo_level_2d(f, w));
  }
  return worst;
}

double bmo_norm(const VectorField& v) {
  double worst = 0.0;
  for (const auto& snap : v.snapshots)
    for (const auto& c : snap) worst = std::max(worst, bmo_norm(c));
  return worst;
}

HolderEstimate holder_norm(const ScalarField& f, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("holder_norm: gamma must lie in (0,1)");
  const int n = f.grid.n;
  const double h = f.grid.spacing();
  HolderEstimate est;
  est.sup = sup_norm(f);

  auto offset_sup = [&](int o0, int o1) {
    double m = 0.0;
    if (f.grid.dim == 1) {
      for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(f[(i + o0) % n] - f[i]));
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m = std::max(m, std::fabs(f.at(i + o0, j + o1) - f.at(i, j)));
    }
    return m;
  };

  std::vector<std::array<int, 2>> dirs{{1, 0}};
  if (f.grid.dim == 2) dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (const auto& dir : dirs) {
    const double step = h * std::sqrt(double(dir[0]) * dir[0] + double(dir[1]) * dir[1]);
    for (int j = 1; j <= n / 4; ++j) {
      const double dist = j * step; // offsets <= L/4 per axis: no wrap in the metric
      est.seminorm = std::max(est.seminorm,
                              offset_sup(j * dir[0], j * dir[1]) / std::pow(dist, gamma));
    }
  }
  return est;
}

namespace {

double sigma_norm_sq(const ScalarField& f, double sigma) {
  const double v = lp_norm(f, sigma);
  return v * v;
}

// Search band for the quotient minimization. Restricting to a fixed resolved
// band does two things: it removes the Nyquist rows (which carry k = 0 in
// every multiplier and are therefore a null direction of the seminorm), and
// it pins the admissible concentration scale so the estimate is stable under
// grid refinement. The critical embedding is scale-invariant, so without the
// cap the discrete minimum keeps creeping down as finer bubbles become
// representable.
int quotient_band(const GridSpec& g) { return std::min(g.n / 4, 32); }

ScalarField project_band(const ScalarField& f, int band) {
  SpectralField spec = forward(f);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto m = modes_of_index(f.grid, i);
    for (int a = 0; a < f.grid.dim; ++a)
      if (std::abs(m[a]) > band) {
        spec[i] = 0.0;
        break;
      }
  }
  return inverse(spec);
}

// One descent run on the scale-invariant quotient Sem(f)/||f||_sigma^2 over
// mean-free band-limited fields.
double descend_quotient(ScalarField f, double alpha, double sigma, int iters) {
  const double cell = f.grid.cell_volume();
  const int band = quotient_band(f.grid);
  f = project_band(mean_free(f), band);
  const double init_norm = lp_norm(f, sigma);
  if (!(init_norm > 0.0)) return std::numeric_limits<double>::infinity();
  f *= 1.0 / init_norm;

  auto quotient = [&](const ScalarField& u) {
    return sobolev_seminorm(u, alpha / 2.0) / sigma_norm_sq(u, sigma);
  };

  double q = quotient(f);
  double step = 0.5;
  double q_marker = q;
  int since_marker = 0;
  for (int it = 0; it < iters; ++it) {
    // stall detection: stop when 25 iterations give < 1e-9 relative progress
    if (++since_marker >= 25) {
      if (q_marker - q < 1e-9 * q_marker) break;
      q_marker = q;
      since_marker = 0;
    }
    const ScalarField lap = fractional_laplacian(f, alpha);
    const double den = sigma_norm_sq(f, sigma);
    const double sem = sobolev_seminorm(f, alpha / 2.0);
    // dQ/df_i = (2 h^d (Lap f)_i - Q * dD/df_i) / D, with D = ||f||_sigma^2
    ScalarField grad(f.grid);
    const double S = std::pow(lp_norm(f, sigma), sigma); // h^d sum |f|^sigma
    const double dcoef = 2.0 * std::pow(S, 2.0 / sigma - 1.0) * cell;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double dD = dcoef * std::pow(std::fabs(f[i]), sigma - 1.0) *
                        (f[i] > 0.0 ? 1.0 : (f[i] < 0.0 ? -1.0 : 0.0));
      grad[i] = (2.0 * cell * lap[i] - (sem / den) * dD) / den;
    }
    grad = mean_free(grad);

    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      ScalarField cand = f;
      for (std::size_t i = 0; i < f.size(); ++i) cand[i] -= step * grad[i];
      cand = project_band(mean_free(cand), band);
      const double nn = lp_norm(cand, sigma);
      if (nn > 0.0) {
        cand *= 1.0 / nn;
        const double qc = quotient(cand);
        if (qc < q) {
          f = std::move(cand);
          q = qc;
          step *= 1.3;
          accepted = true;
          break;
        }
      }
      step *= 0.4;
    }
    if (!accepted && step < 1e-14) break;
  }
  return q;
}

} // namespace

double sobolev_quotient_min(const GridSpec& grid, double alpha, double sigma,
                            std::uint64_t seed, int starts) {
  grid.validate();
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("sobolev_quotient_min: alpha in (0,2]");
  if (!(sigma >= 2.0)) throw std::invalid_argument("sobolev_quotient_min: sigma >= 2");

  const int iters = 240;
  double best = std::numeric_limits<double>::infinity();

  // structured starts: lowest mode and a localized bump
  {
    const double k = 2.0 * M_PI / grid.length;
    ScalarField mode = sample(grid, [&](const Position& x) {
      double v = std::sin(k * x[0]);
      if (grid.dim == 2) v *= std::sin(k * x[1]);
      return v;
    });
    best = std::min(best, descend_quotient(mode, alpha, sigma, iters));

    const Position c{grid.length / 2.0, grid.length / 2.0};
    ScalarField bump = mean_free(
        mollified_step(grid, c, grid.length / 6.0, grid.length / 8.0));
    best = std::min(best, descend_quotient(bump, alpha, sigma, iters));
  }

  for (int s = 0; s < starts; ++s) {
    ScalarField f = random_smooth_field(grid, seed + 77771u * (s + 1),
                                        std::min(grid.n / 4, 12));
    best = std::min(best, descend_quotient(f, alpha, sigma, iters));
  }
  return best;
}

double sobolev_constant(const GridSpec& grid, double alpha, std::uint64_t seed,
                        int starts) {
  if (!(grid.dim > alpha))
    throw std::invalid_argument("sobolev_constant: requires d > alpha");
  if (starts < 8) starts = 8;
  const double sigma = 2.0 * grid.dim / (grid.dim - alpha);
  return sobolev_quotient_min(grid, alpha, sigma, seed, starts);
}

double max_speed(const VectorField& v) {
  double m = 0.0;
  for (const auto& snap : v.snapshots)
    for (const auto& c : snap) m = std::max(m, sup_norm(c));
  return m;
}

} // namespace fraclab
