#ifndef PANELTREND_BANDWIDTH_HPP
#define PANELTREND_BANDWIDTH_HPP

#include <vector>

#include "paneltrend/kernel.hpp"
#include "paneltrend/panel.hpp"

namespace paneltrend {

/// Outcome of the leave-one-out bandwidth search, including the full score
/// table so reports can carry provenance. h_l and h_r are the +-20%
/// sensitivity companions of the winner.
struct CvResult {
  double h_hat = 0.0;
  std::vector<double> h_grid;
  std::vector<double> cv_values; // +inf marks infeasible candidates
  std::vector<double> a_per_h;   // NaN where infeasible
  double h_l = 0.0;              // 0.8 * h_hat
  double h_r = 0.0;              // 1.2 * h_hat
  int n_warnings = 0;            // empty leave-one-out windows encountered
};

/// Leave-one-out cross-validation score
///   CV(h) = sum_{t in C} || Y_t / (sqrt(N) T^{a_h}) - l_loo(tau_t) ||^2,
/// where a_h comes from the full-sample lambda curve at this h and each
/// leave-one-out eigenvector is re-oriented to sign(l' Y_t) before the
/// residual. Returns +inf (and counts a warning) when any window is empty or
/// the spectrum degenerates.
double cv_score(const Panel& panel, double h, const EvaluationSet& c_set,
                BoundaryRule boundary = BoundaryRule::right_adjusted,
                double* a_h_out = nullptr, int* n_warnings = nullptr);

/// Argmin of cv_score over the candidate grid; ties break toward smaller h.
/// Throws std::runtime_error("no feasible bandwidth") if every score is +inf.
CvResult select_bandwidth(const Panel& panel, const std::vector<double>& grid,
                          const EvaluationSet& c_set,
                          BoundaryRule boundary = BoundaryRule::right_adjusted);

/// Default candidate grid: 20 equally spaced points on [max(4/T, 0.05), 0.5].
/// The floor keeps at least four periods inside every kernel window. Throws
/// when T is too short for the range to be non-empty.
std::vector<double> default_grid(int t_count, int n_candidates = 20);

} // namespace paneltrend

#endif // PANELTREND_BANDWIDTH_HPP
