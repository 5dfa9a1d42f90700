#include <doctest.h>

#include "fraclab/regularity.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

TEST_CASE("dictionary construction") {
  GridSpec g(1, 1024, 4.0);
  AtomParams prm;
  const AtomDictionary dict = build_dictionary(g, prm, 5, 16, 3);

  // every member is a genuine atom and resolvable
  for (const Atom& a : dict.atoms) {
    CHECK(a.lambda <= 1.0 + 1e-12);
    CHECK(a.r >= 8.0 * g.spacing());
  }
  CHECK(dict.size() == 5 * 16 * 2);

  SUBCASE("radius list is capped by resolvability") {
    GridSpec tiny(1, 64, 4.0); // 8h = 0.5: only r = 1/2 survives
    const AtomDictionary small = build_dictionary(tiny, prm, 5, 4, 3);
    for (const Atom& a : small.atoms) CHECK(a.r >= 0.5);
    CHECK(small.size() == 4 * 2);
  }
}

TEST_CASE("atomic Holder estimator") {
  GridSpec g(1, 1024, 4.0);
  AtomParams prm;
  const AtomDictionary dict = build_dictionary(g, prm, 5, 16, 3);

  SUBCASE("vanishes on constants") {
    const ScalarField c = sample(g, [](const Position&) { return 4.2; });
    CHECK(holder_atomic(c, 0.5, dict) <= 1e-10);
  }

  SUBCASE("exactly 1-homogeneous") {
    const ScalarField f = random_smooth_field(g, 5, 20);
    const double a = holder_atomic(f, 0.5, dict);
    CHECK(holder_atomic(f * 2.0, 0.5, dict) == doctest::Approx(2.0 * a).epsilon(1e-13));
  }

  SUBCASE("within a factor 3 of the direct estimator on cusp profiles") {
    // cusps on dictionary centers; the sup realizes the atom whose core
    // sits on the singularity
    const double beta = 0.5;
    for (int c = 0; c < 10; ++c) {
      const Position x0{g.length * (c + 0.5) / 16.0, 0.0};
      const ScalarField f = sample(g, [&](const Position& x) {
        return std::pow(periodic_distance(g, x, x0), beta);
      });
      const double atomic = holder_atomic(f, beta, dict);
      const double direct = holder_direct(f, beta).seminorm;
      CHECK(atomic > 0.0);
      CHECK(atomic <= 3.0 * direct);
      CHECK(atomic >= direct / 3.0);
    }
  }

  SUBCASE("equivalence sandwich against the full norm on mixed data") {
    const double c1 = 3.0; // frozen estimator-level constant
    std::vector<ScalarField> tests;
    for (std::uint64_t s : {1u, 2u, 3u}) tests.push_back(random_smooth_field(g, s, 30));
    tests.push_back(sample(g, [&](const Position& x) {
      return std::pow(periodic_distance(g, x, {1.0, 0.0}), 0.5);
    }));
    for (const auto& f : tests)
      CHECK(holder_atomic(f, 0.5, dict) <= c1 * holder_direct(f, 0.5).norm());
  }

  SUBCASE("empty dictionary and bad beta are rejected") {
    AtomDictionary empty;
    const ScalarField f(g);
    CHECK_THROWS_AS(holder_atomic(f, 0.5, empty), std::invalid_argument);
    CHECK_THROWS_AS(holder_atomic(f, 1.5, dict), std::invalid_argument);
  }
}

TEST_CASE("power-law fitting") {
  SUBCASE("recovers exact power laws") {
    std::vector<std::pair<double, double>> series;
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5})
      series.emplace_back(t, 3.0 * std::pow(t, -2.0));
    const PowerLawFit fit = fit_power_law(series);
    CHECK(fit.exponent == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constants fit exponent zero") {
    std::vector<std::pair<double, double>> series;
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2}) series.emplace_back(t, 7.5);
    CHECK(fit_power_law(series).exponent == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("exponential decay is rejected by r2 < 0.9") {
    // sup-norm decay of a single heat mode is exponential, not a power law
    const double rate = 100.0;
    std::vector<std::pair<double, double>> series;
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5})
      series.emplace_back(t, std::exp(-rate * t));
    CHECK(fit_power_law(series).r2 < 0.9);
  }

  SUBCASE("input validation") {
    std::vector<std::pair<double, double>> few{{0.1, 1.0}, {0.2, 2.0}};
    CHECK_THROWS_AS(fit_power_law(few), std::invalid_argument);
    std::vector<std::pair<double, double>> bad{
        {0.1, 1.0}, {0.2, 2.0}, {0.3, -1.0}, {0.4, 2.0}, {0.5, 2.0}};
    CHECK_THROWS_AS(fit_power_law(bad), std::invalid_argument);
  }
}
