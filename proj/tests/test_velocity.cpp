#include <doctest.h>

#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"
#include "fraclab/velocity.hpp"

using namespace fraclab;

TEST_CASE("shear field is exactly divergence-free") {
  GridSpec g(2, 64, 4.0);
  VelocityModel model{VelocityKind::shear, 1.3, 0.5, 0.0, 0.5, 1};
  const VectorField v = build_velocity(model, g);
  CHECK(sup_norm(divergence(v)) == 0.0);
  GridSpec g1(1, 64, 4.0);
  CHECK_THROWS_AS(build_velocity(model, g1), std::invalid_argument);
}

TEST_CASE("perp-gradient construction has spectrally zero divergence") {
  GridSpec g(2, 64, 4.0);
  VelocityModel model{VelocityKind::divergence_free, 1.0, 1.0, 0.0, 0.5, 3};
  const VectorField v = build_velocity(model, g);
  CHECK(sup_norm(divergence(v)) < 1e-10);
  CHECK(max_speed(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compressive sink realizes the prescribed divergence") {
  GridSpec g(2, 64, 4.0);
  VelocityModel model{VelocityKind::compressive_sink, 1.0, 0.5, 2.0, 0.5, 4};
  const VectorField v = build_velocity(model, g);
  const ScalarField target = sink_divergence_profile(model, g);
  const ScalarField div = divergence(v);
  for (std::size_t i = 0; i < div.size(); ++i)
    CHECK(std::fabs(div[i] - target[i]) < 1e-10);

  // prescribed negative mass: (div v)_- integrates to sink_strength times the
  // positive mass of the mean-free unit bump
  double neg_mass = 0.0, bump_pos = 0.0;
  for (std::size_t i = 0; i < div.size(); ++i) {
    neg_mass += negative_part(div[i]);
    bump_pos += positive_part(-target[i] / model.sink_strength);
  }
  CHECK(neg_mass == doctest::Approx(model.sink_strength * bump_pos).epsilon(1e-8));
}

TEST_CASE("same seed gives bit-identical fields") {
  GridSpec g(2, 32, 4.0);
  for (VelocityKind kind : {VelocityKind::divergence_free, VelocityKind::rough_holder,
                            VelocityKind::composite}) {
    VelocityModel model{kind, 0.7, 0.8, 0.5, 0.6, 99};
    const VectorField a = build_velocity(model, g);
    const VectorField b = build_velocity(model, g);
    for (int c = 0; c < g.dim; ++c)
      for (std::size_t i = 0; i < a.snapshot(0)[c].size(); ++i)
        CHECK(a.snapshot(0)[c][i] == b.snapshot(0)[c][i]);
  }
}

TEST_CASE("divergence of a gradient field is the laplacian") {
  GridSpec g(2, 64, 4.0);
  const ScalarField phi = mean_free(random_smooth_field(g, 8, 10));
  std::vector<ScalarField> grad{partial_derivative(phi, 0), partial_derivative(phi, 1)};
  const ScalarField div = divergence(grad);
  const ScalarField lap = fractional_laplacian(phi, 2.0) * (-1.0); // -(-Laplace)phi
  for (std::size_t i = 0; i < div.size(); ++i)
    CHECK(div[i] == doctest::Approx(lap[i]).epsilon(1e-10).scale(sup_norm(lap)));
  CHECK(std::fabs(mean(div)) < 1e-12);

  const VectorField zero(g, {ScalarField(g), ScalarField(g)});
  CHECK(sup_norm(divergence(zero)) == 0.0);
}

TEST_CASE("negative-divergence norm") {
  GridSpec g(2, 64, 4.0);

  SUBCASE("divergence-free fields give zero") {
    VelocityModel model{VelocityKind::divergence_free, 1.0, 1.0, 0.0, 0.5, 5};
    CHECK(neg_div_norm(build_velocity(model, g), 1.0) == 0.0);
  }

  SUBCASE("only the negative part counts (direct quadrature oracle)") {
    VelocityModel model{VelocityKind::compressive_sink, 1.0, 0.6, 1.5, 0.5, 6};
    const VectorField v = build_velocity(model, g);
    for (double alpha : {0.5, 1.0, 1.5}) {
      const ScalarField div = divergence(v);
      const double q = g.dim / alpha;
      double acc = 0.0;
      for (double x : div.values)
        if (x < -1e-10) acc += std::pow(-x, q); // same noise floor as the norm
      const double want = std::pow(acc * g.cell_volume(), 1.0 / q);
      CHECK(neg_div_norm(v, alpha) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  SUBCASE("plateau value: div = -c on a set of measure mu gives ~ c mu^{alpha/d}") {
    // smoothed two-level divergence; the plateau carries almost all the mass
    GridSpec g1(1, 1024, 4.0);
    const double c = 2.0, radius = 0.5;
    ScalarField target = mollified_step(g1, {2.0, 0.0}, radius, 0.02);
    target = mean_free(target * (-c));
    const ScalarField phi = poisson_solve(dealias(target));
    const VectorField v(g1, {partial_derivative(phi, 0)});
    const double mu = 2.0 * radius;
    const double alpha = 0.5;
    // the mean shift is +c*mu/L^d; it lowers the plateau slightly
    const double plateau = c * (1.0 - mu / g1.volume());
    CHECK(neg_div_norm(v, alpha) ==
          doctest::Approx(plateau * std::pow(mu, alpha / 1.0)).epsilon(0.03));
  }

  SUBCASE("requires d > alpha") {
    const VectorField v(g, {ScalarField(g), ScalarField(g)});
    CHECK_THROWS_AS(neg_div_norm(v, 2.0), std::invalid_argument);
    GridSpec g1(1, 16, 1.0);
    CHECK_THROWS_AS(neg_div_norm(VectorField(g1, {ScalarField(g1)}), 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("positive/negative part identities hold exactly") {
  GridSpec g(1, 128, 1.0);
  const ScalarField f = random_smooth_field(g, 31, 30);
  const ScalarField p = positive_part(f), n = negative_part(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] == p[i] - n[i]);
    CHECK(std::fabs(f[i]) == p[i] + n[i]);
    CHECK(p[i] >= 0.0);
    CHECK(n[i] >= 0.0);
  }
}

TEST_CASE("neg_div_norm vanishes iff the divergence is nonnegative") {
  GridSpec g(2, 32, 4.0);
  VelocityModel df{VelocityKind::divergence_free, 1.0, 1.0, 0.0, 0.5, 7};
  const VectorField v = build_velocity(df, g);
  CHECK(neg_div_norm(v, 1.0) == 0.0);
  CHECK(min_value(divergence(v)) >= -1e-10);

  VelocityModel sink{VelocityKind::compressive_sink, 1.0, 0.8, 0.5, 0.5, 8};
  const VectorField w = build_velocity(sink, g);
  CHECK(neg_div_norm(w, 1.0) > 0.0);
  CHECK(min_value(divergence(w)) < -1e-10);
}

TEST_CASE("BMO estimator") {
  GridSpec g(1, 256, 4.0);

  SUBCASE("constants have zero oscillation") {
    CHECK(bmo_norm(sample(g, [](const Position&) { return 42.0; })) == 0.0);
  }

  SUBCASE("single mode: positive, bounded by the amplitude, exactly homogeneous") {
    const double a = 0.7;
    ScalarField f =
        sample(g, [&](const Position& x) { return a * std::sin(2.0 * M_PI * x[0] / 4.0); });
    const double b = bmo_norm(f);
    CHECK(b > 0.0);
    CHECK(b <= a);
    const double b3 = bmo_norm(f * 3.0);
    CHECK(b3 == doctest::Approx(3.0 * b).epsilon(1e-13));
  }

  SUBCASE("exact invariance under cyclic shifts") {
    const ScalarField f = random_smooth_field(g, 9, 20);
    for (int shift : {1, 37, 128}) {
      ScalarField fs(g);
      for (int i = 0; i < g.n; ++i) fs[i] = f[(i + shift) % g.n];
      CHECK(bmo_norm(fs) == bmo_norm(f));
    }
  }

  SUBCASE("mollified log: sup norm blows up faster than the BMO estimate") {
    auto log_profile = [&](double w) {
      return sample(g, [&](const Position& x) {
        const double d = periodic_distance(g, x, {2.0, 0.0});
        return 0.5 * std::log(d * d + w * w);
      });
    };
    const ScalarField wide = log_profile(0.1);
    const ScalarField narrow = log_profile(0.1 / 16.0);
    const double sup_ratio = sup_norm(narrow) / sup_norm(wide);
    const double bmo_ratio = bmo_norm(narrow) / bmo_norm(wide);
    CHECK(sup_ratio > bmo_ratio);
  }

  SUBCASE("2-d estimator agrees with the same contracts") {
    GridSpec g2(2, 16, 4.0);
    CHECK(bmo_norm(sample(g2, [](const Position&) { return -3.0; })) == 0.0);
    const ScalarField f = random_smooth_field(g2, 10, 4);
    CHECK(bmo_norm(f * 2.0) == doctest::Approx(2.0 * bmo_norm(f)).epsilon(1e-13));
  }
}

TEST_CASE("Holder estimator") {
  GridSpec g(1, 1024, 4.0);

  SUBCASE("constants have zero seminorm") {
    CHECK(holder_norm(sample(g, [](const Position&) { return 9.0; }), 0.5).seminorm == 0.0);
  }

  SUBCASE("dist^gamma has seminorm one within 5 percent") {
    for (double gamma : {0.4, 0.6}) {
      ScalarField f = sample(g, [&](const Position& x) {
        return std::pow(periodic_distance(g, x, {0.0, 0.0}), gamma);
      });
      CHECK(holder_norm(f, gamma).seminorm == doctest::Approx(1.0).epsilon(0.05));
    }
  }

  SUBCASE("exact homogeneity") {
    const ScalarField f = random_smooth_field(g, 12, 40);
    const auto e = holder_norm(f, 0.3);
    const auto e2 = holder_norm(f * 2.5, 0.3);
    CHECK(e2.seminorm == doctest::Approx(2.5 * e.seminorm).epsilon(1e-13));
    CHECK(e2.sup == doctest::Approx(2.5 * e.sup).epsilon(1e-13));
  }

  SUBCASE("gamma outside (0,1) is rejected") {
    ScalarField f(g);
    CHECK_THROWS_AS(holder_norm(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(holder_norm(f, 1.0), std::invalid_argument);
  }
}

TEST_CASE("rough synthesis hits a finite Holder norm deterministically") {
  GridSpec g(1, 512, 4.0);
  VelocityModel model{VelocityKind::rough_holder, 1.0, 0.5, 0.0, 0.6, 77};
  const VectorField a = build_velocity(model, g);
  const VectorField b = build_velocity(model, g);
  for (std::size_t i = 0; i < a.snapshot(0)[0].size(); ++i)
    CHECK(a.snapshot(0)[0][i] == b.snapshot(0)[0][i]);
  const auto est = holder_norm(a.snapshot(0)[0], model.holder_exponent);
  CHECK(est.seminorm > 0.0);
  CHECK(est.norm() < 50.0);
}

TEST_CASE("sobolev constant estimator") {
  SUBCASE("returned value lower-bounds every probe quotient") {
    GridSpec g(1, 256, 4.0);
    const double alpha = 0.5;
    const double sigma = 2.0 * g.dim / (g.dim - alpha);
    const double S = sobolev_constant(g, alpha, 0, 8);
    auto quotient = [&](const ScalarField& f) {
      const ScalarField u = mean_free(f);
      const double nn = lp_norm(u, sigma);
      return sobolev_seminorm(u, alpha / 2.0) / (nn * nn);
    };
    std::vector<ScalarField> probes;
    probes.push_back(sample(g, [&](const Position& x) {
      return std::sin(2.0 * M_PI * x[0] / g.length);
    }));
    probes.push_back(mollified_step(g, {2.0, 0.0}, 0.5, 0.3));
    for (std::uint64_t s : {41u, 42u, 43u}) probes.push_back(random_smooth_field(g, s, 12));
    for (const auto& f : probes) CHECK(S <= quotient(f) * (1.0 + 1e-12));
  }

  SUBCASE("stable within 2 percent between n and 2n (d=1, alpha=1/2)") {
    const double a = sobolev_constant(GridSpec(1, 256, 4.0), 0.5, 0, 8);
    const double b = sobolev_constant(GridSpec(1, 512, 4.0), 0.5, 0, 8);
    CHECK(std::fabs(a - b) <= 0.02 * a);
  }

  SUBCASE("deterministic given the seed") {
    const double a = sobolev_constant(GridSpec(1, 128, 4.0), 0.5, 7, 8);
    const double b = sobolev_constant(GridSpec(1, 128, 4.0), 0.5, 7, 8);
    CHECK(a == b);
  }

  SUBCASE("requires d > alpha") {
    CHECK_THROWS_AS(sobolev_constant(GridSpec(1, 64, 4.0), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sobolev_constant(GridSpec(2, 16, 4.0), 2.0), std::invalid_argument);
  }
}

TEST_CASE("time-dependent velocity snapshots interpolate linearly") {
  GridSpec g(1, 16, 1.0);
  ScalarField a = sample(g, [](const Position&) { return 1.0; });
  ScalarField b = sample(g, [](const Position&) { return 3.0; });
  const VectorField v(g, {{a}, {b}}, 0.5);
  CHECK(v.span() == doctest::Approx(0.5));
  CHECK(v.sample(0.0)[0][0] == doctest::Approx(1.0));
  CHECK(v.sample(0.25)[0][0] == doctest::Approx(2.0));
  CHECK(v.sample(0.5)[0][0] == doctest::Approx(3.0));
  CHECK(v.sample(9.0)[0][0] == doctest::Approx(3.0)); // clamped

  CHECK_THROWS_AS(VectorField(g, {{a}, {b}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(VectorField(g, {{a, b}}, 0.0), std::invalid_argument);
}
