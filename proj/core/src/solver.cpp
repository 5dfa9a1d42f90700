#include "fraclab/solver.hpp"

#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

constexpr double kBlowupThreshold = 1e12;

void check_velocity(const std::vector<ScalarField>& v, const GridSpec& g) {
  if (static_cast<int>(v.size()) != g.dim)
    throw std::invalid_argument("advect: component count != dim");
  for (const auto& c : v) {
    require_same_grid(c.grid, g, "advect");
    if (!all_finite(c)) throw std::invalid_argument("advect: NaN in velocity");
  }
}

// --- upwind kernels --------------------------------------------------------
//
// Conservative form. Face velocities are arithmetic means of the adjacent
// cell values; the update is grouped as
//   psi_i <- c0 * psi_i + sum_axes ( cm * psi_{i-1} + cp * psi_{i+1} )
// with all coefficients nonnegative under the CFL bound, which makes
// positivity exact in floating point.

ScalarField upwind_conservative_substep_1d(const ScalarField& psi,
                                           const ScalarField& vface, double lam) {
  const int n = psi.grid.n;
  ScalarField out(psi.grid);
  for (int i = 0; i < n; ++i) {
    const double vr = vface[i];                 // face i+1/2
    const double vl = vface[(i + n - 1) % n];   // face i-1/2
    const double outflow = positive_part(vr) + negative_part(vl);
    out[i] = psi[i] * (1.0 - lam * outflow)
           + psi[(i + n - 1) % n] * (lam * positive_part(vl))
           + psi[(i + 1) % n] * (lam * negative_part(vr));
  }
  return out;
}

ScalarField upwind_conservative_substep_2d(const ScalarField& psi,
                                           const ScalarField& vface0,
                                           const ScalarField& vface1, double lam) {
  const int n = psi.grid.n;
  ScalarField out(psi.grid);
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n, ip = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jm = (j + n - 1) % n, jp = (j + 1) % n;
      const double vr0 = vface0.at(i, j), vl0 = vface0.at(im, j);
      const double vr1 = vface1.at(i, j), vl1 = vface1.at(i, jm);
      const double outflow = positive_part(vr0) + negative_part(vl0) +
                             positive_part(vr1) + negative_part(vl1);
      out.at(i, j) = psi.at(i, j) * (1.0 - lam * outflow)
                   + psi.at(im, j) * (lam * positive_part(vl0))
                   + psi.at(ip, j) * (lam * negative_part(vr0))
                   + psi.at(i, jm) * (lam * positive_part(vl1))
                   + psi.at(i, jp) * (lam * negative_part(vr1));
    }
  }
  return out;
}

// Convective form for d_t theta = (v . grad) theta, i.e. transport with
// velocity -v in the characteristic sense; upwind on cell-centered speeds.
ScalarField upwind_convective_substep(const ScalarField& theta,
                                      const std::vector<ScalarField>& v, double lam) {
  const int n = theta.grid.n;
  ScalarField out(theta.grid);
  if (theta.grid.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double w = -v[0][i];
      out[i] = theta[i] * (1.0 - lam * std::fabs(w))
             + theta[(i + n - 1) % n] * (lam * positive_part(w))
             + theta[(i + 1) % n] * (lam * negative_part(w));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const int im = (i + n - 1) % n, ip = (i + 1) % n;
      for (int j = 0; j < n; ++j) {
        const int jm = (j + n - 1) % n, jp = (j + 1) % n;
        const double w0 = -v[0].at(i, j);
        const double w1 = -v[1].at(i, j);
        out.at(i, j) = theta.at(i, j) * (1.0 - lam * (std::fabs(w0) + std::fabs(w1)))
                     + theta.at(im, j) * (lam * positive_part(w0))
                     + theta.at(ip, j) * (lam * negative_part(w0))
                     + theta.at(i, jm) * (lam * positive_part(w1))
                     + theta.at(i, jp) * (lam * negative_part(w1));
      }
    }
  }
  return out;
}

std::vector<ScalarField> face_velocities(const std::vector<ScalarField>& v) {
  const GridSpec& g = v[0].grid;
  const int n = g.n;
  std::vector<ScalarField> faces;
  faces.reserve(v.size());
  if (g.dim == 1) {
    ScalarField f(g);
    for (int i = 0; i < n; ++i) f[i] = 0.5 * (v[0][i] + v[0][(i + 1) % n]);
    faces.push_back(std::move(f));
  } else {
    ScalarField f0(g), f1(g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        f0.at(i, j) = 0.5 * (v[0].at(i, j) + v[0].at(i + 1, j));
        f1.at(i, j) = 0.5 * (v[1].at(i, j) + v[1].at(i, j + 1));
      }
    faces.push_back(std::move(f0));
    faces.push_back(std::move(f1));
  }
  return faces;
}

double summed_speed(const std::vector<ScalarField>& comps) {
  double s = 0.0;
  for (const auto& c : comps) {
    double mp = 0.0, mm = 0.0;
    for (double x : c.values) {
      mp = std::max(mp, positive_part(x));
      mm = std::max(mm, negative_part(x));
    }
    s += mp + mm;
  }
  return s;
}

int substep_count(double dt, double speed, double h, double cfl) {
  if (speed <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(dt * speed / (cfl * h) - 1e-12)));
}

// --- spectral advection ----------------------------------------------------

ScalarField conservative_rhs(const ScalarField& psi, const std::vector<ScalarField>& v) {
  ScalarField rhs = partial_derivative(pointwise_product(v[0], psi), 0);
  for (std::size_t a = 1; a < v.size(); ++a)
    rhs += partial_derivative(pointwise_product(v[a], psi), static_cast<int>(a));
  return rhs * (-1.0);
}

ScalarField convective_rhs(const ScalarField& theta, const std::vector<ScalarField>& v) {
  ScalarField rhs = pointwise_product(v[0], partial_derivative(theta, 0));
  for (std::size_t a = 1; a < v.size(); ++a)
    rhs += pointwise_product(v[a], partial_derivative(theta, static_cast<int>(a)));
  return rhs;
}

template <typename Rhs>
ScalarField ssprk3(const ScalarField& u, double dt, Rhs&& rhs, bool do_dealias) {
  ScalarField u1 = u + dt * rhs(u);
  ScalarField u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1));
  ScalarField out = (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * rhs(u2));
  return do_dealias ? dealias(out) : out;
}

enum class Form { conservative, convective };

ScalarField advect(const ScalarField& u, const std::vector<ScalarField>& v, double dt,
                   double cfl, Form form, AdvectionScheme scheme, bool do_dealias) {
  check_velocity(v, u.grid);
  if (!(dt > 0.0)) throw std::invalid_argument("advect: dt must be positive");
  const double h = u.grid.spacing();

  if (scheme == AdvectionScheme::upwind_fv) {
    if (form == Form::conservative) {
      const auto faces = face_velocities(v);
      const int m = substep_count(dt, summed_speed(faces), h, cfl);
      const double lam = dt / m / h;
      ScalarField out = u;
      for (int s = 0; s < m; ++s)
        out = u.grid.dim == 1 ? upwind_conservative_substep_1d(out, faces[0], lam)
                              : upwind_conservative_substep_2d(out, faces[0], faces[1], lam);
      return out;
    }
    const int m = substep_count(dt, summed_speed(v), h, cfl);
    const double lam = dt / m / h;
    ScalarField out = u;
    for (int s = 0; s < m; ++s) out = upwind_convective_substep(out, v, lam);
    return out;
  }

  // spectral path: SSP-RK3 under the same CFL subdivision
  const int m = substep_count(dt, summed_speed(v), h, cfl);
  const double dts = dt / m;
  ScalarField out = u;
  for (int s = 0; s < m; ++s) {
    if (form == Form::conservative) {
      out = ssprk3(out, dts, [&](const ScalarField& w) { return conservative_rhs(w, v); },
                   do_dealias);
    } else {
      out = ssprk3(out, dts, [&](const ScalarField& w) { return convective_rhs(w, v); },
                   do_dealias);
    }
  }
  return out;
}

// --- orchestration ---------------------------------------------------------

StepDiagnostics diagnostics_of(const ScalarField& f, double t, double diag_p) {
  StepDiagnostics d;
  d.time = t;
  d.mass = integral(f);
  d.l1 = lp_norm(f, 1.0);
  d.l2 = lp_norm(f, 2.0);
  d.lp = lp_norm(f, diag_p);
  d.min = min_value(f);
  d.max = max_value(f);
  return d;
}

struct DiffusionMultiplier {
  GridSpec grid;
  std::vector<double> mult;

  DiffusionMultiplier(const GridSpec& g, double alpha, double dt) : grid(g) {
    mult.resize(g.size());
    for (std::size_t i = 0; i < mult.size(); ++i) {
      const auto k = wavevector(g, i);
      const double kk = std::sqrt(k[0] * k[0] + k[1] * k[1]);
      mult[i] = kk == 0.0 ? 1.0 : std::exp(-dt * std::pow(kk, alpha));
    }
  }

  ScalarField apply(const ScalarField& f) const {
    SpectralField spec = forward(f);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= mult[i];
    return inverse(spec);
  }
};

// Shared driver; `velocity_at` maps solver time to the advecting components.
template <typename VelocityAt>
Trajectory integrate(const ScalarField& u0, const SolverConfig& cfg, Form form,
                     VelocityAt&& velocity_at, double speed_hint) {
  cfg.validate();
  u0.grid.validate();
  if (!all_finite(u0)) throw std::invalid_argument("solve: non-finite initial data");

  const double h = u0.grid.spacing();
  double dt = cfg.dt;
  if (dt <= 0.0) {
    dt = cfg.horizon / 32.0;
    if (speed_hint > 0.0) dt = std::min(dt, cfg.cfl * h / speed_hint);
  }
  const auto nsteps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cfg.horizon / dt - 1e-12)));
  dt = cfg.horizon / static_cast<double>(nsteps);

  const DiffusionMultiplier full(u0.grid, cfg.alpha, dt);

  Trajectory traj;
  traj.config = cfg;
  traj.snapshots.emplace_back(0.0, u0);
  traj.diagnostics.push_back(diagnostics_of(u0, 0.0, cfg.diag_p));

  ScalarField u = u0;
  for (std::size_t step = 0; step < nsteps; ++step) {
    const double t0 = static_cast<double>(step) * dt;
    if (cfg.scheme == SplitScheme::strang) {
      u = advect(u, velocity_at(t0 + 0.25 * dt), 0.5 * dt, cfg.cfl, form, cfg.advection,
                 cfg.dealias);
      u = full.apply(u);
      u = advect(u, velocity_at(t0 + 0.75 * dt), 0.5 * dt, cfg.cfl, form, cfg.advection,
                 cfg.dealias);
    } else {
      u = advect(u, velocity_at(t0 + 0.5 * dt), dt, cfg.cfl, form, cfg.advection,
                 cfg.dealias);
      u = full.apply(u);
    }
    const double t1 = static_cast<double>(step + 1) * dt;
    traj.diagnostics.push_back(diagnostics_of(u, t1, cfg.diag_p));
    traj.steps = step + 1;

    if (traj.diagnostics.back().max > kBlowupThreshold ||
        -traj.diagnostics.back().min > kBlowupThreshold ||
        !std::isfinite(traj.diagnostics.back().l2)) {
      traj.aborted = true;
      traj.snapshots.emplace_back(t1, u);
      return traj;
    }
    if ((step + 1) % static_cast<std::size_t>(cfg.snapshot_stride) == 0 ||
        step + 1 == nsteps) {
      traj.snapshots.emplace_back(t1, u);
    }
  }
  return traj;
}

} // namespace

void SolverConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("SolverConfig: alpha must lie in (0,2]");
  if (!(horizon > 0.0)) throw std::invalid_argument("SolverConfig: horizon must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0))
    throw std::invalid_argument("SolverConfig: cfl must lie in (0,1]");
  if (snapshot_stride < 1)
    throw std::invalid_argument("SolverConfig: snapshot_stride must be >= 1");
  if (dt < 0.0) throw std::invalid_argument("SolverConfig: dt must be >= 0");
  if (!(diag_p >= 1.0)) throw std::invalid_argument("SolverConfig: diag_p must be >= 1");
}

const char* to_string(SplitScheme s) { return s == SplitScheme::strang ? "strang" : "lie"; }
const char* to_string(AdvectionScheme s) {
  return s == AdvectionScheme::upwind_fv ? "upwind_fv" : "spectral";
}
SplitScheme split_scheme_from_string(const std::string& s) {
  if (s == "strang") return SplitScheme::strang;
  if (s == "lie") return SplitScheme::lie;
  throw std::invalid_argument("unknown split scheme: " + s);
}
AdvectionScheme advection_scheme_from_string(const std::string& s) {
  if (s == "upwind_fv") return AdvectionScheme::upwind_fv;
  if (s == "spectral") return AdvectionScheme::spectral;
  throw std::invalid_argument("unknown advection scheme: " + s);
}

ScalarField step_advect_conservative(const ScalarField& psi,
                                     const std::vector<ScalarField>& v, double dt,
                                     double cfl) {
  return advect(psi, v, dt, cfl, Form::conservative, AdvectionScheme::upwind_fv, false);
}
ScalarField step_advect_conservative(const ScalarField& psi, const VectorField& v,
                                     double dt, double cfl) {
  return step_advect_conservative(psi, v.snapshot(0), dt, cfl);
}

ScalarField step_advect_primal(const ScalarField& theta,
                               const std::vector<ScalarField>& v, double dt,
                               double cfl) {
  return advect(theta, v, dt, cfl, Form::convective, AdvectionScheme::upwind_fv, false);
}
ScalarField step_advect_primal(const ScalarField& theta, const VectorField& v, double dt,
                               double cfl) {
  return step_advect_primal(theta, v.snapshot(0), dt, cfl);
}

Trajectory solve_primal(const ScalarField& theta0, const VectorField& v,
                        const SolverConfig& cfg) {
  require_same_grid(theta0.grid, v.grid, "solve_primal");
  if (v.is_static()) {
    const auto comps = v.snapshot(0);
    check_velocity(comps, theta0.grid);
    return integrate(theta0, cfg, Form::convective,
                     [&](double) -> const std::vector<ScalarField>& { return comps; },
                     summed_speed(comps));
  }
  return integrate(theta0, cfg, Form::convective,
                   [&](double t) { return v.sample(t); }, max_speed(v) * v.grid.dim);
}

Trajectory solve_dual(const ScalarField& psi0, const VectorField& v, double t,
                      const SolverConfig& cfg) {
  require_same_grid(psi0.grid, v.grid, "solve_dual");
  if (!(t > 0.0)) throw std::invalid_argument("solve_dual: horizon must be > 0");
  if (!v.is_static() && t > v.span() + 1e-12)
    throw std::invalid_argument("solve_dual: horizon exceeds velocity span");
  SolverConfig dual_cfg = cfg;
  dual_cfg.horizon = t;
  if (v.is_static()) {
    const auto comps = v.snapshot(0);
    check_velocity(comps, psi0.grid);
    return integrate(psi0, dual_cfg, Form::conservative,
                     [&](double) -> const std::vector<ScalarField>& { return comps; },
                     summed_speed(comps));
  }
  return integrate(psi0, dual_cfg, Form::conservative,
                   [&](double s) { return v.sample(t - s); }, max_speed(v) * v.grid.dim);
}

PairingResult duality_pairing(const Trajectory& theta_traj, const Trajectory& psi_traj) {
  require_same_grid(theta_traj.initial().grid, psi_traj.initial().grid, "duality_pairing");
  if (std::fabs(theta_traj.final_time() - psi_traj.final_time()) > 1e-9)
    throw std::invalid_argument("duality_pairing: horizon mismatch");
  PairingResult r;
  r.lhs = inner(theta_traj.final_field(), psi_traj.initial());
  r.rhs = inner(theta_traj.initial(), psi_traj.final_field());
  const double scale = std::max({std::fabs(r.lhs), std::fabs(r.rhs), 1e-300});
  r.rel_error = std::fabs(r.lhs - r.rhs) / scale;
  return r;
}

} // namespace fraclab
