#include <doctest.h>

#include "fraclab/oracles.hpp"
#include "fraclab/spectral.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

namespace {

ScalarField three_mode_field(const GridSpec& g) {
  const double k = 2.0 * M_PI / g.length;
  return sample(g, [&](const Position& x) {
    return std::sin(k * x[0]) + 0.6 * std::cos(2.0 * k * x[0]) +
           0.3 * std::sin(3.0 * k * x[0] + 0.7);
  });
}

double rel_l2_gap(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

} // namespace

TEST_CASE("kernel oracle matches the multiplier on a single mode, better with n") {
  const double k = 2.0 * 2.0 * M_PI / 4.0; // second mode
  auto mode_error = [&](int n, double alpha) {
    GridSpec g(1, n, 4.0);
    ScalarField f = sample(g, [&](const Position& x) { return std::cos(k * x[0]); });
    ScalarField lf = kernel_fractional_laplacian(f, alpha, 10);
    const double kk = std::pow(k, alpha);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::fabs(lf[i] - kk * f[i]));
    return err / kk;
  };
  for (double alpha : {0.5, 1.0, 1.5}) {
    CHECK(mode_error(64, alpha) < mode_error(16, alpha));
    CHECK(mode_error(64, alpha) < 0.05);
  }
}

TEST_CASE("kernel oracle kills constants and keeps zero mean") {
  GridSpec g(1, 32, 4.0);
  ScalarField c = sample(g, [](const Position&) { return 1.7; });
  CHECK(sup_norm(kernel_fractional_laplacian(c, 1.0, 10)) < 1e-12);

  ScalarField f = random_smooth_field(g, 3, 9);
  CHECK(std::fabs(mean(kernel_fractional_laplacian(f, 0.8, 10))) < 1e-10);
}

TEST_CASE("kernel positivity: nonnegative output at a strict interior maximum") {
  GridSpec g(1, 64, 4.0);
  ScalarField bump = mollified_step(g, {2.0, 0.0}, 0.5, 0.3);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < bump.size(); ++i)
    if (bump[i] > bump[arg]) arg = i;
  for (double alpha : {0.5, 1.0, 1.5}) {
    ScalarField lb = kernel_fractional_laplacian(bump, alpha, 10);
    CHECK(lb[arg] >= 0.0);
  }
}

TEST_CASE("oracle/production agreement on a fixed band-limited function") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    double gap16 = 0.0, gap64 = 0.0;
    for (int n : {16, 64}) {
      GridSpec g(1, n, 4.0);
      ScalarField f = three_mode_field(g);
      const double gap =
          rel_l2_gap(fractional_laplacian(f, alpha), kernel_fractional_laplacian(f, alpha, 10));
      (n == 16 ? gap16 : gap64) = gap;
    }
    CHECK(gap64 <= 0.05);
    CHECK(gap64 <= gap16);
  }
}

TEST_CASE("kernel oracle guards its cost and range") {
  GridSpec big(1, 128, 4.0);
  CHECK_THROWS_AS(kernel_fractional_laplacian(ScalarField(big), 1.0, 10),
                  std::invalid_argument);
  GridSpec g(1, 16, 4.0);
  CHECK_THROWS_AS(kernel_fractional_laplacian(ScalarField(g), 2.0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_fractional_laplacian(ScalarField(g), 1.0, 0),
                  std::invalid_argument);
}

TEST_CASE("exact translation") {
  GridSpec g(1, 256, 4.0);
  ScalarField bump = mollified_step(g, {1.0, 0.0}, 0.4, 0.25);

  SUBCASE("zero shift is the identity") {
    ScalarField out = exact_translation(bump, {0.0, 0.0});
    for (std::size_t i = 0; i < bump.size(); ++i)
      CHECK(std::fabs(out[i] - bump[i]) < 1e-13);
  }

  SUBCASE("full-period shift returns the field") {
    ScalarField out = exact_translation(bump, {g.length, 0.0});
    for (std::size_t i = 0; i < bump.size(); ++i)
      CHECK(std::fabs(out[i] - bump[i]) < 1e-13);
  }

  SUBCASE("one-cell shift of a band-limited bump equals an index roll") {
    const ScalarField smooth = dealias(bump); // roll = shift only below Nyquist
    const double h = g.spacing();
    ScalarField out = exact_translation(smooth, {h, 0.0});
    for (int i = 0; i < g.n; ++i)
      CHECK(std::fabs(out[i] - smooth[(i + g.n - 1) % g.n]) < 1e-13);
  }
}
