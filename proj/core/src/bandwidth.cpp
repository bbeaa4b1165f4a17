#include "paneltrend/bandwidth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "paneltrend/estimators.hpp"
#include "paneltrend/local_cov.hpp"
#include "paneltrend/spectral.hpp"

namespace paneltrend {

double cv_score(const Panel& panel, double h, const EvaluationSet& c_set,
                BoundaryRule boundary, double* a_h_out, int* n_warnings) {
  if (c_set.indices.empty()) {
    throw std::invalid_argument("cv_score: evaluation set is empty");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (a_h_out) *a_h_out = nan;

  KernelSpec spec{KernelFamily::epanechnikov, h, boundary};
  spec.validate();

  double a_h = 0.0;
  try {
    LambdaCurve curve = lambda_curve(panel, spec, c_set);
    a_h = a_hat(curve, panel.n_periods());
  } catch (const std::exception&) {
    if (n_warnings) ++*n_warnings;
    return inf;
  }
  if (a_h_out) *a_h_out = a_h;

  const double n_units = static_cast<double>(panel.n_units());
  const double scale = std::sqrt(n_units) *
                       std::pow(static_cast<double>(panel.n_periods()), a_h);

  double score = 0.0;
  for (int t : c_set.indices) {
    Eigen::VectorXd loo_vector;
    try {
      LocalCovariance cov = sigma_loo(panel, spec, t);
      loo_vector = top_eigenpair(cov.matrix).vector;
    } catch (const std::exception&) {
      if (n_warnings) ++*n_warnings;
      return inf;
    }
    const Eigen::VectorXd y = panel.values.col(t - 1);
    // the eigenvector's global sign is arbitrary; orient it toward Y_t so
    // the score measures shape mismatch, not orientation
    if (loo_vector.dot(y) < 0.0) loo_vector = -loo_vector;
    score += (y / scale - loo_vector).squaredNorm();
  }
  return score;
}

CvResult select_bandwidth(const Panel& panel, const std::vector<double>& grid,
                          const EvaluationSet& c_set, BoundaryRule boundary) {
  if (grid.empty()) {
    throw std::invalid_argument("select_bandwidth: empty candidate grid");
  }
  for (double h : grid) {
    if (!(h > 0.0) || h >= 1.0) {
      throw std::invalid_argument("select_bandwidth: candidates must lie in (0, 1)");
    }
  }

  CvResult out;
  out.h_grid = grid;
  out.cv_values.resize(grid.size());
  out.a_per_h.resize(grid.size());

  int best = -1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.cv_values[k] = cv_score(panel, grid[k], c_set, boundary, &out.a_per_h[k],
                                &out.n_warnings);
    if (!std::isfinite(out.cv_values[k])) continue;
    if (best < 0 || out.cv_values[k] < out.cv_values[best] ||
        (out.cv_values[k] == out.cv_values[best] && grid[k] < grid[best])) {
      best = static_cast<int>(k);
    }
  }
  if (best < 0) {
    throw std::runtime_error("no feasible bandwidth");
  }
  out.h_hat = grid[best];
  out.h_l = 0.8 * out.h_hat;
  out.h_r = 1.2 * out.h_hat;
  return out;
}

std::vector<double> default_grid(int t_count, int n_candidates) {
  if (t_count < 2 || n_candidates < 1) {
    throw std::invalid_argument("default_grid: bad arguments");
  }
  const double lo = std::max(4.0 / t_count, 0.05);
  const double hi = 0.5;
  if (lo > hi) {
    throw std::runtime_error("default_grid: sample too short for the candidate range");
  }
  std::vector<double> grid(n_candidates);
  if (n_candidates == 1) {
    grid[0] = lo;
    return grid;
  }
  for (int k = 0; k < n_candidates; ++k) {
    grid[k] = lo + (hi - lo) * k / (n_candidates - 1);
  }
  return grid;
}

} // namespace paneltrend
