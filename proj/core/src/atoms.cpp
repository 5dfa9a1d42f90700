#include "fraclab/atoms.hpp"

#include <map>
#include <mutex>
#include <random>

#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"

namespace fraclab {

void AtomParams::validate() const {
  if (!(A >= 1.0)) throw std::invalid_argument("AtomParams: A must be >= 1");
  if (!(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("AtomParams: omega must lie in (0,1)");
  if (!(p > 1.0)) throw std::invalid_argument("AtomParams: p must exceed 1");
  if (epsilon < 0.0) throw std::invalid_argument("AtomParams: epsilon must be >= 0");
}

double default_omega(double alpha, int dim) {
  if (alpha < 1.0) {
    const double lo = positive_part(alpha - dim / 2.0);
    return 0.5 * (lo + alpha);
  }
  if (alpha < 2.0) return alpha / 2.0;
  return 0.75;
}

double omega_weight(double dist, double omega) {
  if (!(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("omega_weight: omega must lie in (0,1)");
  if (dist < 0.0) throw std::invalid_argument("omega_weight: negative distance");
  return std::min(std::pow(dist, omega), 1.0);
}

ScalarField omega_weight_field(const GridSpec& grid, const Position& center,
                               double omega) {
  return sample(grid, [&](const Position& x) {
    return omega_weight(periodic_distance(grid, x, center), omega);
  });
}

double unit_ball_volume(int dim) {
  return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double canonical_amplitude_bound(int dim, const AtomParams& params) {
  const double b1 = unit_ball_volume(dim);
  // 1/p = 0 for p = inf
  return std::min({1.0 / b1, params.A * std::pow(b1, -1.0 / params.p),
                   b1 / (dim + params.omega)});
}

namespace {

// Normalized compactly supported mollifier sampled on the grid.
ScalarField mollifier(const GridSpec& grid, double eps) {
  ScalarField rho = sample(grid, [&](const Position& x) {
    const double d = periodic_distance(grid, x, {0.0, 0.0}) / eps;
    return d < 1.0 ? std::exp(-1.0 / (1.0 - d * d)) : 0.0;
  });
  const double m = integral(rho);
  if (!(m > 0.0)) throw std::invalid_argument("mollifier: width unresolved");
  rho *= 1.0 / m;
  return rho;
}

ScalarField convolve(const ScalarField& f, const ScalarField& kernel) {
  SpectralField a = forward(f);
  const SpectralField b = forward(kernel);
  const double cell = f.grid.cell_volume();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i] * cell;
  return inverse(a);
}

// Scale the positive part so positive and negative masses cancel exactly.
void balance_masses(ScalarField& f) {
  double sp = 0.0, sn = 0.0;
  for (double v : f.values) {
    sp += positive_part(v);
    sn += negative_part(v);
  }
  if (!(sp > 0.0) || !(sn > 0.0))
    throw std::invalid_argument("atom profile degenerate: one-signed samples");
  const double scale = sn / sp;
  for (double& v : f.values)
    if (v > 0.0) v *= scale;
}

Atom finalize_atom(ScalarField f, double r, const Position& center,
                   const AtomParams& params) {
  f = mean_free(f); // removes the round-off residue of the balanced split
  MembershipResult m = atom_membership(f, r, params.p, params);
  if (m.lambda > 1.0) {
    f *= 1.0 / m.lambda;
    m = atom_membership(f, r, params.p, params);
  }
  Atom atom;
  atom.field = std::move(f);
  atom.r = r;
  atom.center = center;
  atom.params = params;
  atom.lambda = m.lambda;
  return atom;
}

} // namespace

Atom build_canonical_atom(const GridSpec& grid, double r, const AtomParams& params) {
  const Position c{grid.length / 2.0, grid.length / 2.0};
  return build_canonical_atom(grid, r, params, c);
}

Atom build_canonical_atom(const GridSpec& grid, double r, const AtomParams& params,
                          const Position& center) {
  grid.validate();
  params.validate();
  const double h = grid.spacing();
  if (!(r >= 8.0 * h))
    throw std::invalid_argument("build_canonical_atom: r must be >= 8h");
  if (!(r <= 1.0)) throw std::invalid_argument("build_canonical_atom: r must be <= 1");

  const double C = 0.95 * canonical_amplitude_bound(grid.dim, params);
  const double inner = r * std::pow(2.0, -1.0 / grid.dim);
  const double amp = C * std::pow(r, -grid.dim);

  ScalarField f = sample(grid, [&](const Position& x) {
    const double d = periodic_distance(grid, x, center);
    if (d <= inner) return -amp;
    if (d <= r) return amp;
    return 0.0;
  });
  balance_masses(f);

  // auto width r/8, floored at 3h so the edges stay mollified on grids that
  // only just resolve the atom
  const double eps = params.epsilon > 0.0 ? params.epsilon : std::max(r / 8.0, 3.0 * h);
  if (eps >= 2.0 * h) f = convolve(f, mollifier(grid, eps));

  return finalize_atom(std::move(f), r, center, params);
}

Atom build_random_atom(const GridSpec& grid, double r, const AtomParams& params,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x8f14e45fceea167aULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Position c{unit(rng) * grid.length,
                   grid.dim == 2 ? unit(rng) * grid.length : 0.0};
  return build_random_atom(grid, r, params, seed, c);
}

Atom build_random_atom(const GridSpec& grid, double r, const AtomParams& params,
                       std::uint64_t seed, const Position& center) {
  grid.validate();
  params.validate();
  const double h = grid.spacing();
  if (!(r >= 8.0 * h))
    throw std::invalid_argument("build_random_atom: r must be >= 8h");
  if (!(r <= 1.0)) throw std::invalid_argument("build_random_atom: r must be <= 1");

  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642fULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // negative core at the center, positive bump a fraction of r away
  const double angle = grid.dim == 2 ? 2.0 * M_PI * unit(rng)
                                     : (unit(rng) < 0.5 ? 0.0 : M_PI);
  const double sep = r * (0.7 + 0.2 * unit(rng));
  Position cp = center;
  cp[0] += sep * std::cos(angle);
  if (grid.dim == 2) cp[1] += sep * std::sin(angle);
  const double wn = r * (1.0 / 12.0 + unit(rng) / 24.0);
  const double wp = r * (1.0 / 10.0 + unit(rng) / 15.0);
  const double ap = 0.5 + unit(rng);
  const double an = 0.5 + unit(rng);

  ScalarField f = sample(grid, [&](const Position& x) {
    const double dp = periodic_distance(grid, x, cp) / wp;
    const double dn = periodic_distance(grid, x, center) / wn;
    return ap * std::exp(-4.0 * dp * dp) - an * std::exp(-4.0 * dn * dn);
  });
  balance_masses(f);
  f = mean_free(f);

  MembershipResult m = atom_membership(f, r, params.p, params);
  if (!(m.lambda > 0.0)) throw std::logic_error("build_random_atom: degenerate field");
  f *= 1.0 / m.lambda; // tight: largest ratio becomes exactly one

  Atom atom;
  atom.field = std::move(f);
  atom.r = r;
  atom.center = center;
  atom.params = params;
  atom.lambda = 1.0;
  return atom;
}

MembershipParts membership_parts(const ScalarField& f, const AtomParams& params) {
  f.grid.validate();
  MembershipParts parts;
  parts.l1 = lp_norm(f, 1.0);
  if (parts.l1 == 0.0) return parts; // zero field
  if (std::fabs(integral(f)) > 1e-10 * parts.l1)
    throw std::invalid_argument("atom_membership: input is not mean-free");
  parts.lp = lp_norm(f, params.p);

  // Concentration against every candidate center at once: the integral
  // int |f(x)| Omega(x - c) dx over centers c is the circular convolution of
  // |f| with the (even) weight, evaluated by FFT.
  const ScalarField w = omega_weight_field(f.grid, {0.0, 0.0}, params.omega);
  SpectralField a = forward(abs_field(f));
  const SpectralField b = forward(w);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  ScalarField conc = inverse(a);
  conc *= f.grid.cell_volume();

  std::size_t best = 0;
  for (std::size_t i = 1; i < conc.size(); ++i)
    if (conc[i] < conc[best]) best = i;
  parts.center = node_position(f.grid, best);
  parts.concentration = conc[best];
  return parts;
}

double membership_lambda(const MembershipParts& parts, double rho, int dim,
                         const AtomParams& params) {
  if (!(rho > 0.0)) throw std::invalid_argument("membership_lambda: rho must be positive");
  const double r2 = parts.lp / (params.A * std::pow(rho, -dim * (1.0 - 1.0 / params.p)));
  const double r3 = parts.concentration / std::pow(rho, params.omega);
  return std::max({parts.l1, r2, r3});
}

MembershipResult atom_membership(const ScalarField& f, double r, double p,
                                 const AtomParams& params) {
  if (!(r > 0.0)) throw std::invalid_argument("atom_membership: r must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("atom_membership: p must exceed 1");
  AtomParams prm = params;
  prm.p = p;

  MembershipResult res;
  const MembershipParts parts = membership_parts(f, prm);
  if (parts.l1 == 0.0) return res; // zero field: lambda 0, center at node 0

  const int d = f.grid.dim;
  res.ratio_l1 = parts.l1;
  res.ratio_lp = parts.lp / (prm.A * std::pow(r, -d * (1.0 - 1.0 / p)));
  res.ratio_concentration = parts.concentration / std::pow(r, prm.omega);
  res.center = parts.center;
  res.lambda = std::max({res.ratio_l1, res.ratio_lp, res.ratio_concentration});
  return res;
}

InterpolationRatios interpolation_ratios(const Atom& atom, double q) {
  const AtomParams& pr = atom.params;
  if (!(q >= 1.0 && q <= pr.p))
    throw std::invalid_argument("interpolation_ratios: q must lie in [1, p]");
  const int d = atom.field.grid.dim;
  const double nq = lp_norm(atom.field, q);
  const double rq = std::pow(atom.r, -d * (1.0 - 1.0 / q));

  InterpolationRatios out;
  const double theta = (1.0 - 1.0 / q) / (1.0 - 1.0 / pr.p);
  out.direct = nq / (std::pow(pr.A, theta) * rq);
  const double ae = (pr.omega + d * (1.0 - 1.0 / q)) / (pr.omega + d * (1.0 - 1.0 / pr.p));
  out.appendix = nq / (std::pow(pr.A, ae) * rq);
  return out;
}

namespace {

std::mutex g_appendix_mtx;
std::map<std::tuple<int, double, double, double, double>, double> g_appendix_cache;

double calibrate_appendix(int dim, double q, const AtomParams& params) {
  const GridSpec grid = dim == 1 ? GridSpec(1, 1024, 4.0) : GridSpec(2, 256, 4.0);
  double worst = 0.0;
  for (double r : {0.25, 0.125, 0.0625}) {
    if (r < 8.0 * grid.spacing()) continue;
    worst = std::max(worst,
                     interpolation_ratios(build_canonical_atom(grid, r, params), q).appendix);
    for (std::uint64_t seed = 1000; seed < 1032; ++seed) {
      worst = std::max(
          worst, interpolation_ratios(build_random_atom(grid, r, params, seed), q).appendix);
    }
  }
  return 1.25 * worst;
}

} // namespace

double appendix_constant(int dim, double q, const AtomParams& params) {
  const auto key = std::make_tuple(dim, q, params.p, params.omega, params.A);
  std::lock_guard<std::mutex> lock(g_appendix_mtx);
  auto it = g_appendix_cache.find(key);
  if (it != g_appendix_cache.end()) return it->second;
  const double c = calibrate_appendix(dim, q, params);
  g_appendix_cache.emplace(key, c);
  return c;
}

bool interpolation_check(const Atom& atom, double q) {
  if (!(atom.lambda <= 1.0 + 1e-9))
    throw std::invalid_argument("interpolation_check: atom must have lambda <= 1");
  const InterpolationRatios ratios = interpolation_ratios(atom, q);
  const double c = appendix_constant(atom.field.grid.dim, q, atom.params);
  return ratios.direct <= 1.0 + 1e-9 && ratios.appendix <= c;
}

namespace {

// Mollified-indicator average of the velocity over B(x, r); the quintic edge
// of width 2h keeps the right-hand side of the center ODE smooth in x.
std::array<double, 2> ball_average(const std::vector<ScalarField>& v, const Position& x,
                                   double r) {
  const GridSpec& g = v[0].grid;
  const double h = g.spacing();
  const double edge = 2.0 * h;
  const int reach = static_cast<int>(std::ceil((r + edge) / h)) + 1;
  std::array<double, 2> acc{0.0, 0.0};
  double wsum = 0.0;

  auto weight = [&](double dist) {
    const double u = std::clamp((r + edge - dist) / (2.0 * edge), 0.0, 1.0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  };

  if (g.dim == 1) {
    const int i0 = static_cast<int>(std::floor(x[0] / h));
    for (int i = i0 - reach; i <= i0 + reach; ++i) {
      const double w = weight(periodic_delta(i * h, x[0], g.length));
      if (w == 0.0) continue;
      acc[0] += w * v[0][((i % g.n) + g.n) % g.n];
      wsum += w;
    }
  } else {
    const int i0 = static_cast<int>(std::floor(x[0] / h));
    const int j0 = static_cast<int>(std::floor(x[1] / h));
    for (int i = i0 - reach; i <= i0 + reach; ++i) {
      const double dx = periodic_delta(i * h, x[0], g.length);
      if (dx > r + edge) continue;
      for (int j = j0 - reach; j <= j0 + reach; ++j) {
        const double dy = periodic_delta(j * h, x[1], g.length);
        const double w = weight(std::sqrt(dx * dx + dy * dy));
        if (w == 0.0) continue;
        acc[0] += w * v[0].at(i, j);
        acc[1] += w * v[1].at(i, j);
        wsum += w;
      }
    }
  }
  if (!(wsum > 0.0)) throw std::logic_error("ball_average: empty ball");
  return {acc[0] / wsum, acc[1] / wsum};
}

std::array<double, 2> interpolate_velocity(const std::vector<ScalarField>& v,
                                           const Position& x) {
  const GridSpec& g = v[0].grid;
  const double h = g.spacing();
  std::array<double, 2> out{0.0, 0.0};
  if (g.dim == 1) {
    const double s = x[0] / h;
    const int i = static_cast<int>(std::floor(s));
    const double w = s - i;
    const int n = g.n;
    out[0] = (1.0 - w) * v[0][((i % n) + n) % n] + w * v[0][(((i + 1) % n) + n) % n];
  } else {
    const double s0 = x[0] / h, s1 = x[1] / h;
    const int i = static_cast<int>(std::floor(s0));
    const int j = static_cast<int>(std::floor(s1));
    const double w0 = s0 - i, w1 = s1 - j;
    for (int c = 0; c < 2; ++c) {
      out[c] = (1.0 - w0) * ((1.0 - w1) * v[c].at(i, j) + w1 * v[c].at(i, j + 1)) +
               w0 * ((1.0 - w1) * v[c].at(i + 1, j) + w1 * v[c].at(i + 1, j + 1));
    }
  }
  return out;
}

Position wrap(const GridSpec& g, Position x) {
  for (int a = 0; a < g.dim; ++a) {
    x[a] = std::fmod(x[a], g.length);
    if (x[a] < 0.0) x[a] += g.length;
  }
  return x;
}

} // namespace

std::vector<Position> track_center(const VectorField& v, const Position& x0, double r,
                                   const std::vector<double>& times, CenterMode mode) {
  if (times.empty()) return {};
  if (!v.is_static() && times.back() > v.span() + 1e-12)
    throw std::invalid_argument("track_center: times exceed velocity span");

  auto rhs = [&](double t, const Position& x) -> std::array<double, 2> {
    const auto comps = v.sample(t);
    return mode == CenterMode::ball_average ? ball_average(comps, x, r)
                                            : interpolate_velocity(comps, x);
  };

  std::vector<Position> path;
  path.reserve(times.size());
  Position x = wrap(v.grid, x0);
  path.push_back(x);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t = times[i - 1];
    const double dt = times[i] - t;
    if (!(dt > 0.0)) throw std::invalid_argument("track_center: times must increase");
    const auto k1 = rhs(t, x);
    Position mid = x;
    for (int a = 0; a < v.grid.dim; ++a) mid[a] += 0.5 * dt * k1[a];
    const auto k2 = rhs(t + 0.5 * dt, wrap(v.grid, mid));
    for (int a = 0; a < v.grid.dim; ++a) x[a] += dt * k2[a];
    x = wrap(v.grid, x);
    path.push_back(x);
  }
  return path;
}

std::vector<std::pair<double, double>> chi_series(const Trajectory& traj,
                                                  const std::vector<Position>& path,
                                                  const std::vector<double>& path_times,
                                                  double omega) {
  if (path.size() != path_times.size())
    throw std::invalid_argument("chi_series: path/time size mismatch");
  std::vector<std::pair<double, double>> out;
  out.reserve(path.size());
  std::size_t snap = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    while (snap < traj.snapshots.size() &&
           traj.snapshots[snap].first < path_times[i] - 1e-9)
      ++snap;
    if (snap >= traj.snapshots.size() ||
        std::fabs(traj.snapshots[snap].first - path_times[i]) > 1e-9)
      throw std::invalid_argument("chi_series: path time has no matching snapshot");
    const ScalarField w =
        omega_weight_field(traj.snapshots[snap].second.grid, path[i], omega);
    out.emplace_back(path_times[i], inner(abs_field(traj.snapshots[snap].second), w));
  }
  return out;
}

} // namespace fraclab
