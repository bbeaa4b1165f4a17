#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "paneltrend/kernel.hpp"

using namespace paneltrend;

namespace {

KernelSpec spec_adjusted(double h) {
  return {KernelFamily::epanechnikov, h, BoundaryRule::right_adjusted};
}

KernelSpec spec_plain(double h) {
  return {KernelFamily::epanechnikov, h, BoundaryRule::none};
}

// midpoint-rule quadrature of the kernel weight over tau in [0, 1]
double kernel_mass(const KernelSpec& spec, double u, double step) {
  double acc = 0.0;
  const long n = std::lround(1.0 / step);
  for (long k = 0; k < n; ++k) {
    acc += kernel_weight(spec, (k + 0.5) * step, u);
  }
  return acc * step;
}

} // namespace

TEST_CASE("kernel peak values") {
  CHECK(kernel_weight(spec_plain(1.0), 0.5, 0.5) == 0.75);
  // at the right endpoint the adjustment divides by the half mass 0.5
  CHECK(kernel_weight(spec_adjusted(1.0), 1.0, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("compact support") {
  const KernelSpec s = spec_adjusted(0.2);
  CHECK(kernel_weight(s, 0.7, 0.4) == 0.0);
  CHECK(kernel_weight(s, 0.2, 0.4) == 0.0); // |tau-u| == h is the closed edge of zero
  CHECK(kernel_weight(s, 0.41, 0.4) > 0.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double tau = unif(rng);
    const double u = std::max(1e-9, unif(rng));
    const double w = kernel_weight(s, tau, u);
    CHECK(w >= 0.0);
    if (std::abs(tau - u) > s.h) CHECK(w == 0.0);
  }
}

TEST_CASE("boundary mass is exact in closed form") {
  CHECK(epanechnikov_mass(-1.0) == 0.0);
  CHECK(epanechnikov_mass(1.0) == 1.0);
  CHECK(epanechnikov_mass(0.0) == 0.5);
  // quadrature cross-check of the antiderivative
  for (double z : {-0.7, -0.2, 0.3, 0.9}) {
    double acc = 0.0;
    const double step = 1e-6;
    for (double w = -1.0 + step / 2; w < z; w += step) acc += epanechnikov(w) * step;
    CHECK(epanechnikov_mass(z) == doctest::Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("adjusted kernel integrates to one near the right boundary") {
  const KernelSpec s = spec_adjusted(0.2);
  for (double u : {0.5, 0.9, 0.95, 1.0}) {
    CHECK(std::abs(kernel_mass(s, u, 1e-5) - 1.0) < 1e-6);
  }
  // without the adjustment, mass is lost at the boundary
  CHECK(kernel_mass(spec_plain(0.2), 1.0, 1e-5) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("bandwidth validation") {
  CHECK_THROWS_AS(kernel_weight(spec_plain(0.0), 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kernel_weight(spec_plain(1.5), 0.5, 0.5), std::invalid_argument);
  CHECK_NOTHROW(kernel_weight(spec_plain(1.0), 0.5, 0.5));
}

TEST_CASE("local constant smoother reproduces constants") {
  const std::vector<double> series(12, 3.25);
  const std::vector<int> grid{4, 7, 12};
  const std::vector<double> out = local_constant_smooth(series, 1, spec_adjusted(0.3), grid);
  for (double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("full-span bandwidth gives the global weighted mean") {
  const std::vector<double> series{1.0, 5.0, 2.0, 8.0};
  const KernelSpec s = spec_plain(1.0);
  const std::vector<double> out = local_constant_smooth(series, 1, s, {2});
  double mass = 0.0, acc = 0.0;
  for (int t = 1; t <= 4; ++t) {
    const double w = kernel_weight(s, t / 4.0, 2 / 4.0);
    mass += w;
    acc += w * series[t - 1];
  }
  CHECK(out[0] == doctest::Approx(acc / mass).epsilon(1e-15));
}

TEST_CASE("three-point smoother matches the hand-computed weighted sum") {
  // tau = (1/3, 2/3, 1), u = 1, h = 0.4: only t = 2, 3 fall in the window
  const std::vector<double> series{1.0, 2.0, 3.0};
  const std::vector<double> out = local_constant_smooth(series, 1, spec_adjusted(0.4), {3});
  const double w2 = epanechnikov((2.0 / 3.0 - 1.0) / 0.4);
  const double w3 = epanechnikov(0.0);
  const double expected = (2.0 * w2 + 3.0 * w3) / (w2 + w3);
  CHECK(out[0] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("smoother commutes with affine maps") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  std::vector<double> series(30);
  for (double& v : series) v = unif(rng);
  std::vector<int> grid;
  for (int t = 5; t <= 30; t += 3) grid.push_back(t);

  const KernelSpec s = spec_adjusted(0.25);
  const std::vector<double> base = local_constant_smooth(series, 1, s, grid);
  std::vector<double> mapped(series.size());
  const double a = -1.7, b = 0.9;
  for (std::size_t k = 0; k < series.size(); ++k) mapped[k] = a * series[k] + b;
  const std::vector<double> out = local_constant_smooth(mapped, 1, s, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(out[k] == doctest::Approx(a * base[k] + b).epsilon(1e-12));
  }
}

TEST_CASE("tiny bandwidth concentrates on the grid point itself") {
  const std::vector<double> series{4.0, 9.0, 1.0, 7.0, 2.0, 6.0, 3.0, 8.0, 5.0, 0.5};
  const std::vector<double> out = local_constant_smooth(series, 1, spec_adjusted(0.04), {7});
  CHECK(out[0] == doctest::Approx(series[6]).epsilon(1e-15));
}

TEST_CASE("smoother rejects grid points outside the active range") {
  const std::vector<double> series{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(local_constant_smooth(series, 3, spec_adjusted(0.5), {2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(local_constant_smooth(series, 1, spec_adjusted(0.5), {5}),
                  std::invalid_argument);
}
