#include <doctest.h>

#include "fraclab/oracles.hpp"
#include "fraclab/solver.hpp"
#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

namespace {

VectorField zero_velocity(const GridSpec& g) {
  return VectorField(g, std::vector<ScalarField>(g.dim, ScalarField(g)));
}

VectorField constant_velocity(const GridSpec& g, double c) {
  std::vector<ScalarField> comps(g.dim, ScalarField(g));
  comps[0] = sample(g, [&](const Position&) { return c; });
  return VectorField(g, comps);
}

} // namespace

TEST_CASE("advection steps with zero velocity are the identity") {
  GridSpec g(1, 128, 4.0);
  const ScalarField f = random_smooth_field(g, 1, 20);
  const VectorField v0 = zero_velocity(g);
  const ScalarField a = step_advect_conservative(f, v0, 0.3);
  const ScalarField b = step_advect_primal(f, v0, 0.3);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(a[i] == f[i]);
    CHECK(b[i] == f[i]);
  }
}

TEST_CASE("constant-velocity transport against the spectral-shift oracle") {
  const double c = 0.8, t = 0.7;

  auto run = [&](int n) {
    GridSpec g(1, n, 4.0);
    const ScalarField psi0 = positivized(random_smooth_field(g, 11, 12));
    const VectorField v = constant_velocity(g, c);

    // dual/conservative moves with +v: psi(t, x) = psi0(x - v t)
    const ScalarField adv = step_advect_conservative(psi0, v, t);
    const ScalarField want = exact_translation(psi0, {c * t, 0.0});
    double err = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i)
      err = std::max(err, std::fabs(adv[i] - want[i]));

    const double mass_drift =
        std::fabs(integral(adv) - integral(psi0)) / lp_norm(psi0, 1.0);
    return std::make_tuple(err, mass_drift, min_value(adv));
  };

  const auto [e256, drift256, min256] = run(256);
  const auto [e512, drift512, min512] = run(512);
  CHECK(drift256 <= 1e-14);
  CHECK(drift512 <= 1e-14);
  CHECK(min256 >= 0.0); // upwind positivity is exact
  CHECK(min512 >= 0.0);
  CHECK(e512 < e256); // first-order error shrinks with h

  SUBCASE("primal convective form moves the other way") {
    GridSpec g(1, 256, 4.0);
    const ScalarField th0 = random_smooth_field(g, 3, 10);
    const VectorField v = constant_velocity(g, c);
    const ScalarField adv = step_advect_primal(th0, v, t);
    const ScalarField want = exact_translation(th0, {-c * t, 0.0});
    double err = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i)
      err = std::max(err, std::fabs(adv[i] - want[i]));
    CHECK(err < 0.2 * sup_norm(th0));
  }
}

TEST_CASE("upwind positivity and max principle are exact") {
  GridSpec g(2, 64, 4.0);
  const ScalarField psi0 = positivized(random_smooth_field(g, 5, 10));
  VelocityModel model{VelocityKind::composite, 0.5, 0.8, 0.7, 0.5, 9};
  const VectorField v = build_velocity(model, g);

  const ScalarField after = step_advect_conservative(psi0, v, 0.25);
  CHECK(min_value(after) >= 0.0);

  const ScalarField th = step_advect_primal(psi0, v, 0.25);
  const double range = max_value(psi0) - min_value(psi0);
  CHECK(min_value(th) >= min_value(psi0) - 1e-13 * range);
  CHECK(max_value(th) <= max_value(psi0) + 1e-13 * range);
}

TEST_CASE("advection rejects bad input") {
  GridSpec g(1, 16, 1.0);
  ScalarField f(g);
  VectorField v0 = zero_velocity(g);
  CHECK_THROWS_AS(step_advect_conservative(f, v0, 0.0), std::invalid_argument);
  ScalarField bad(g);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step_advect_conservative(f, VectorField(g, {bad}), 0.1),
                  std::invalid_argument);
}

TEST_CASE("solve_primal with v = 0 follows the diffusion semigroup") {
  GridSpec g(1, 256, 4.0);
  const ScalarField th0 = random_smooth_field(g, 7, 30);
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.horizon = 0.5;
  cfg.dt = 0.01;
  const Trajectory traj = solve_primal(th0, zero_velocity(g), cfg);
  const ScalarField want = diffusion_semigroup(th0, 1.0, 0.5);
  for (std::size_t i = 0; i < th0.size(); ++i)
    CHECK(std::fabs(traj.final_field()[i] - want[i]) <= 1e-12 * sup_norm(want));
}

TEST_CASE("alpha = 2, v = 0: single mode decays like exp(-|k|^2 t)") {
  GridSpec g(1, 128, 4.0);
  const double k = 2.0 * M_PI / g.length;
  const ScalarField mode = sample(g, [&](const Position& x) { return std::cos(k * x[0]); });
  SolverConfig cfg;
  cfg.alpha = 2.0;
  cfg.horizon = 0.3;
  cfg.dt = 0.015;
  const Trajectory traj = solve_primal(mode, zero_velocity(g), cfg);
  const double decay = std::exp(-k * k * 0.3);
  for (int i = 0; i < g.n; ++i)
    CHECK(std::fabs(traj.final_field()[i] - decay * mode[i]) <= 1e-12);
}

TEST_CASE("Richardson self-convergence in dt has order >= 1") {
  GridSpec g(1, 128, 4.0);
  const ScalarField th0 = random_smooth_field(g, 13, 8);
  const ScalarField vx =
      sample(g, [&](const Position& x) { return 0.4 * std::sin(2.0 * M_PI * x[0] / 4.0); });
  const VectorField v(g, {vx});

  auto at_dt = [&](double dt) {
    SolverConfig cfg;
    cfg.alpha = 0.5;
    cfg.horizon = 0.2;
    cfg.dt = dt;
    return solve_primal(th0, v, cfg).final_field();
  };
  const ScalarField fine = at_dt(0.005);
  const ScalarField mid = at_dt(0.01);
  const ScalarField coarse = at_dt(0.02);
  const double e1 = lp_norm(coarse - fine, 2.0);
  const double e2 = lp_norm(mid - fine, 2.0);
  CHECK(std::log2(e1 / e2) >= 0.8);
}

TEST_CASE("dual solve: mean constant, L1 monotone, positivity") {
  GridSpec g(1, 256, 4.0);
  VelocityModel model{VelocityKind::composite, 0.4, 0.6, 0.8, 0.5, 21};
  const VectorField v = build_velocity(model, g);
  SolverConfig cfg;
  cfg.alpha = 1.0;

  SUBCASE("v = 0 equals the semigroup") {
    const ScalarField psi0 = mean_free(random_smooth_field(g, 2, 20));
    const Trajectory traj = solve_dual(psi0, zero_velocity(g), 0.4, cfg);
    const ScalarField want = diffusion_semigroup(psi0, 1.0, 0.4);
    for (std::size_t i = 0; i < psi0.size(); ++i)
      CHECK(std::fabs(traj.final_field()[i] - want[i]) <= 1e-12 * sup_norm(psi0));
  }

  SUBCASE("mean is constant to 1e-13 for all s") {
    const ScalarField psi0 = mean_free(random_smooth_field(g, 4, 20));
    const Trajectory traj = solve_dual(psi0, v, 0.5, cfg);
    const double m0 = traj.diagnostics.front().mass;
    for (const auto& d : traj.diagnostics)
      CHECK(std::fabs(d.mass - m0) <= 1e-13 * lp_norm(psi0, 1.0));
  }

  SUBCASE("nonnegative data stays above -1e-12") {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
      const ScalarField psi0 = positivized(random_smooth_field(g, seed, 20));
      const Trajectory traj = solve_dual(psi0, v, 0.5, cfg);
      for (const auto& d : traj.diagnostics) CHECK(d.min >= -1e-12);
    }
  }

  SUBCASE("L1 non-increasing within 1e-10 per step on signed data") {
    const ScalarField psi0 = mean_free(random_smooth_field(g, 6, 20));
    const Trajectory traj = solve_dual(psi0, v, 0.5, cfg);
    double prev = traj.diagnostics.front().l1;
    for (const auto& d : traj.diagnostics) {
      CHECK(d.l1 <= prev + 1e-10);
      prev = d.l1;
    }
  }
}

TEST_CASE("duality pairing") {
  GridSpec g(1, 256, 4.0);
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.horizon = 0.25;

  SUBCASE("zero-horizon pairing is exact") {
    const ScalarField th0 = random_smooth_field(g, 1, 10);
    const ScalarField ps0 = random_smooth_field(g, 2, 10);
    Trajectory a, b;
    a.snapshots.emplace_back(0.0, th0);
    b.snapshots.emplace_back(0.0, ps0);
    const PairingResult r = duality_pairing(a, b);
    CHECK(r.rel_error == 0.0);
    CHECK(r.lhs == r.rhs);
  }

  SUBCASE("v = 0 agrees with the Fourier mode sum") {
    const ScalarField th0 = random_smooth_field(g, 3, 12);
    const ScalarField ps0 = mean_free(random_smooth_field(g, 4, 12));
    const Trajectory tp = solve_primal(th0, zero_velocity(g), cfg);
    const Trajectory td = solve_dual(ps0, zero_velocity(g), 0.25, cfg);
    const PairingResult r = duality_pairing(tp, td);
    CHECK(r.rel_error <= 1e-10);

    // oracle: sum_k exp(-t |k|^alpha) theta0_hat conj(psi0_hat)
    const SpectralField a = forward(th0);
    const SpectralField b = forward(ps0);
    const double nd = static_cast<double>(g.size());
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto k = wavevector(g, i);
      const double kk = std::sqrt(k[0] * k[0] + k[1] * k[1]);
      const double mult = kk == 0.0 ? 1.0 : std::exp(-0.25 * kk);
      s += mult * a[i] * std::conj(b[i]);
    }
    const double oracle = s.real() * g.volume() / (nd * nd);
    CHECK(r.lhs == doctest::Approx(oracle).epsilon(1e-10));
  }

  SUBCASE("smooth static velocity: small gap, shrinking under refinement") {
    auto gap_at = [&](int n) {
      GridSpec gg(1, n, 4.0);
      const ScalarField th0 = random_smooth_field(gg, 5, 8);
      const ScalarField ps0 = mean_free(random_smooth_field(gg, 9, 8));
      const ScalarField vx = sample(gg, [&](const Position& x) {
        return 0.3 + 0.05 * std::sin(2.0 * M_PI * x[0] / 4.0);
      });
      const Trajectory tp = solve_primal(th0, VectorField(gg, {vx}), cfg);
      const Trajectory td = solve_dual(ps0, VectorField(gg, {vx}), 0.25, cfg);
      return duality_pairing(tp, td).rel_error;
    };
    const double coarse = gap_at(512);
    const double fine = gap_at(1024);
    CHECK(coarse <= 5e-3);
    CHECK(coarse / fine >= 1.4);
  }

  SUBCASE("horizon mismatch is rejected") {
    const ScalarField th0 = random_smooth_field(g, 3, 8);
    const Trajectory tp = solve_primal(th0, zero_velocity(g), cfg);
    SolverConfig other = cfg;
    other.horizon = 0.5;
    const Trajectory td = solve_dual(th0, zero_velocity(g), 0.5, other);
    CHECK_THROWS_AS(duality_pairing(tp, td), std::invalid_argument);
  }
}

TEST_CASE("time-dependent velocity: reversed sampling and span guard") {
  GridSpec g(1, 128, 4.0);
  const ScalarField psi0 = positivized(random_smooth_field(g, 17, 12));
  const ScalarField vx = sample(g, [](const Position&) { return 0.5; });
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.dt = 0.02;

  SUBCASE("identical snapshots reproduce the static field") {
    const VectorField vt(g, {{vx}, {vx}, {vx}}, 0.25);
    const VectorField vs(g, {vx});
    const Trajectory a = solve_dual(psi0, vt, 0.5, cfg);
    const Trajectory b = solve_dual(psi0, vs, 0.5, cfg);
    for (std::size_t i = 0; i < psi0.size(); ++i)
      CHECK(a.final_field()[i] == doctest::Approx(b.final_field()[i]).epsilon(1e-14));
  }

  SUBCASE("horizon beyond the snapshot span is rejected") {
    const VectorField vt(g, {{vx}, {vx}}, 0.2);
    CHECK_THROWS_AS(solve_dual(psi0, vt, 0.5, cfg), std::invalid_argument);
  }
}

TEST_CASE("blow-up detector aborts with diagnostics instead of crashing") {
  GridSpec g(1, 64, 4.0);
  ScalarField huge = random_smooth_field(g, 8, 10) * 1e13;
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.horizon = 0.1;
  cfg.dt = 0.01;
  const Trajectory traj = solve_primal(huge, zero_velocity(g), cfg);
  CHECK(traj.aborted);
  CHECK(traj.diagnostics.size() >= 2);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.cfl = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.alpha = 2.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.horizon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("spectral advection is near-exact on band-limited transport") {
  GridSpec g(1, 256, 4.0);
  const ScalarField psi0 = random_smooth_field(g, 14, 10);
  const VectorField v = constant_velocity(g, 0.6);
  const double t = 0.5;

  SolverConfig cfg;
  cfg.advection = AdvectionScheme::spectral;
  cfg.alpha = 1.0;
  cfg.horizon = t;
  cfg.dt = 0.01;

  // pure transport comparison: disable diffusion influence by comparing both
  // paths against their own oracle composition
  const ScalarField upwind = step_advect_conservative(psi0, v, t);
  const ScalarField want = exact_translation(psi0, {0.6 * t, 0.0});
  double err_upwind = 0.0;
  for (std::size_t i = 0; i < psi0.size(); ++i)
    err_upwind = std::max(err_upwind, std::fabs(upwind[i] - want[i]));

  // spectral advection substeps through the solver path with alpha ~ 0: use
  // the internal advect by running one Strang step of pure advection
  const Trajectory traj = solve_dual(psi0, v, t, cfg);
  const ScalarField sp = traj.final_field();
  const ScalarField want_diffused = diffusion_semigroup(want, 1.0, t);
  double err_spectral = 0.0;
  for (std::size_t i = 0; i < psi0.size(); ++i)
    err_spectral = std::max(err_spectral, std::fabs(sp[i] - want_diffused[i]));
  CHECK(err_spectral < 0.05 * err_upwind);
}

TEST_CASE("lie splitting runs and stays conservative") {
  GridSpec g(1, 128, 4.0);
  VelocityModel model{VelocityKind::composite, 0.3, 0.6, 0.5, 0.5, 77};
  const VectorField v = build_velocity(model, g);
  const ScalarField psi0 = positivized(random_smooth_field(g, 15, 15));
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.scheme = SplitScheme::lie;
  const Trajectory traj = solve_dual(psi0, v, 0.3, cfg);
  const double m0 = traj.diagnostics.front().mass;
  for (const auto& d : traj.diagnostics)
    CHECK(std::fabs(d.mass - m0) <= 1e-13 * lp_norm(psi0, 1.0));
}
