#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "paneltrend/bandwidth.hpp"
#include "paneltrend/estimators.hpp"
#include "paneltrend/spectral.hpp"
#include "paneltrend/synthetic.hpp"

using namespace paneltrend;

namespace {

// Straight-line reimplementation of the whole CV formula: fresh kernel
// arithmetic, fresh Sigma sums, Jacobi eigenvectors. Kept deliberately
// independent of the production code path it checks.
double brute_force_cv(const Panel& panel, double h, const EvaluationSet& c_set) {
  const int n = panel.n_units();
  const int t_count = panel.n_periods();

  auto weight = [&](double tau, double u) {
    const double z = (tau - u) / h;
    if (std::abs(z) > 1.0) return 0.0;
    double k = 0.75 * (1.0 - z * z);
    if (u > 1.0 - h) {
      const double zb = (1.0 - u) / h;
      k /= 0.75 * (zb - zb * zb * zb / 3.0) + 0.5;
    }
    return k / h;
  };

  auto sigma_at = [&](double u, int skip) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int t = 1; t <= t_count; ++t) {
      if (t == skip) continue;
      const double w = weight(static_cast<double>(t) / t_count, u);
      if (w == 0.0) continue;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          m(i, j) += w * panel.values(i, t - 1) * panel.values(j, t - 1);
        }
      }
    }
    return (m / (static_cast<double>(n) * t_count)).eval();
  };

  double mean_lambda = 0.0;
  for (int t : c_set.indices) {
    mean_lambda += full_spectrum_oracle(sigma_at(panel.tau(t), 0)).back();
  }
  mean_lambda /= c_set.size();
  const double a_h = std::log(mean_lambda) / (2.0 * std::log(static_cast<double>(t_count)));

  const double scale = std::sqrt(static_cast<double>(n)) * std::pow(t_count, a_h);
  double score = 0.0;
  for (int t : c_set.indices) {
    const SpectralDecomposition full = full_spectrum(sigma_at(panel.tau(t), t));
    Eigen::VectorXd l = full.eigenvectors.col(n - 1);
    const Eigen::VectorXd y = panel.values.col(t - 1);
    if (l.dot(y) < 0.0) l = -l;
    score += (y / scale - l).squaredNorm();
  }
  return score;
}

Panel small_panel() {
  Panel p;
  p.values.resize(2, 6);
  p.values << 0.9, 1.4, 1.1, 1.8, 2.1, 1.9,
              0.7, 1.0, 1.3, 1.2, 1.6, 1.8;
  p.starts = {1, 1};
  p.unit_ids = {"AAA", "BBB"};
  return p;
}

} // namespace

TEST_CASE("cv_score matches the brute-force reimplementation on a 2x6 panel") {
  const Panel p = small_panel();
  const EvaluationSet c = eval_set(p, EvalRule::quarter_trim); // {2..6}
  for (double h : {0.35, 0.5, 0.8}) {
    const double fast = cv_score(p, h, c);
    const double slow = brute_force_cv(p, h, c);
    CHECK(std::abs(fast - slow) < 1e-10);
  }
}

TEST_CASE("aligned panels score only the kernel discretization residual") {
  // Y_t = kappa * sqrt(N) * e for every t: the leave-one-out eigenvector is e
  // itself, so the score collapses to |C| * (1/sqrt(m) - 1)^2 where m is the
  // mean kernel mass over the evaluation points. With exact unit mass the
  // score would be zero; the closed form pins the discrete case.
  const int n = 2, t_count = 8;
  const double h = 0.9;
  const KernelSpec kspec{KernelFamily::epanechnikov, h, BoundaryRule::right_adjusted};

  Panel proto;
  proto.values = Eigen::MatrixXd::Ones(n, t_count);
  proto.starts = {1, 1};
  proto.unit_ids = {"AAA", "BBB"};
  const EvaluationSet c = eval_set(proto, EvalRule::quarter_trim);

  double m = 0.0;
  for (int t : c.indices) {
    double mass = 0.0;
    for (int s = 1; s <= t_count; ++s) {
      mass += kernel_weight(kspec, proto.tau(s), proto.tau(t));
    }
    m += mass / t_count;
  }
  m /= c.size();
  const double expected = c.size() * std::pow(1.0 / std::sqrt(m) - 1.0, 2.0);

  for (double kappa : {1.0, 5.0}) { // the score is scale-free
    const Panel p = rescale(proto, kappa);
    const double score = cv_score(p, h, c);
    CHECK(std::abs(score - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("select_bandwidth returns the argmin with ties toward smaller h") {
  SyntheticSpec spec;
  spec.n_units = 8;
  spec.n_periods = 60;
  spec.a_true = 0.35;
  spec.noise_sd = 0.3;
  spec.noise_law = NoiseLaw::gaussian;
  spec.seed = 5;
  spec.g_profiles.clear();
  for (int i = 0; i < 8; ++i) {
    spec.g_profiles.push_back(i % 2 ? GProfile::linear(0.8, 0.6)
                                    : GProfile::linear(-0.7, 1.4));
  }
  const Panel panel = generate(spec).first;
  const EvaluationSet c = eval_set(panel, EvalRule::quarter_trim);

  const CvResult cv = select_bandwidth(panel, default_grid(60), c);
  // oracle argmin over the recorded table
  int best = -1;
  for (std::size_t k = 0; k < cv.cv_values.size(); ++k) {
    if (!std::isfinite(cv.cv_values[k])) continue;
    if (best < 0 || cv.cv_values[k] < cv.cv_values[best]) best = static_cast<int>(k);
  }
  CHECK(cv.h_hat == cv.h_grid[best]);
  CHECK(cv.h_l == 0.8 * cv.h_hat);
  CHECK(cv.h_r == 1.2 * cv.h_hat);

  // every cached a_per_h must equal an independent recomputation
  for (std::size_t k = 0; k < cv.h_grid.size(); ++k) {
    if (!std::isfinite(cv.cv_values[k])) continue;
    const KernelSpec ks{KernelFamily::epanechnikov, cv.h_grid[k],
                        BoundaryRule::right_adjusted};
    const double a = a_hat(lambda_curve(panel, ks, c), 60);
    CHECK(cv.a_per_h[k] == doctest::Approx(a).epsilon(1e-14));
  }
}

TEST_CASE("single-candidate grids select that candidate") {
  const Panel p = small_panel();
  const EvaluationSet c = eval_set(p, EvalRule::quarter_trim);
  const CvResult cv = select_bandwidth(p, {0.5}, c);
  CHECK(cv.h_hat == 0.5);
}

TEST_CASE("cv_score is invariant to unit reordering") {
  SyntheticSpec spec;
  spec.n_units = 6;
  spec.n_periods = 50;
  spec.a_true = 0.3;
  spec.g_profiles = {GProfile::linear(0.5, 0.7)};
  spec.noise_sd = 0.25;
  spec.noise_law = NoiseLaw::gaussian;
  spec.seed = 6;
  const Panel panel = generate(spec).first;
  const EvaluationSet c = eval_set(panel, EvalRule::quarter_trim);

  Panel reversed = panel;
  for (int i = 0; i < 6; ++i) {
    reversed.values.row(i) = panel.values.row(5 - i);
    reversed.starts[i] = panel.starts[5 - i];
    reversed.unit_ids[i] = panel.unit_ids[5 - i];
  }
  const double a = cv_score(panel, 0.3, c);
  const double b = cv_score(reversed, 0.3, c);
  CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, a));
}

TEST_CASE("empty windows poison the candidate instead of aborting") {
  const Panel p = small_panel();
  EvaluationSet c;
  c.indices = {3, 4, 5, 6};
  int warnings = 0;
  // h below the grid spacing 1/6 leaves every leave-one-out window empty
  const double score = cv_score(p, 0.1, c, BoundaryRule::right_adjusted, nullptr, &warnings);
  CHECK(std::isinf(score));
  CHECK(warnings > 0);

  CHECK_THROWS_WITH_AS(select_bandwidth(p, {0.1}, c), doctest::Contains("no feasible"),
                       std::runtime_error);
}

TEST_CASE("default grid respects its bounds") {
  const std::vector<double> grid = default_grid(100);
  CHECK(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(0.5).epsilon(1e-15));
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] > grid[k - 1]);

  const std::vector<double> short_grid = default_grid(10);
  CHECK(short_grid.front() == doctest::Approx(0.4).epsilon(1e-15));

  CHECK_THROWS_AS(default_grid(6), std::runtime_error); // 4/T exceeds 0.5
}

TEST_CASE("candidates outside (0,1) are rejected") {
  const Panel p = small_panel();
  const EvaluationSet c = eval_set(p, EvalRule::quarter_trim);
  CHECK_THROWS_AS(select_bandwidth(p, {0.5, 1.0}, c), std::invalid_argument);
  CHECK_THROWS_AS(select_bandwidth(p, {}, c), std::invalid_argument);
}
