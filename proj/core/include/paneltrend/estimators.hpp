#ifndef PANELTREND_ESTIMATORS_HPP
#define PANELTREND_ESTIMATORS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "paneltrend/kernel.hpp"
#include "paneltrend/local_cov.hpp"
#include "paneltrend/panel.hpp"
#include "paneltrend/spectral.hpp"

namespace paneltrend {

/// Leading local eigenpair per evaluation period. `degenerate` marks periods
/// whose local second-moment matrix vanished (lambda == 0); downstream ratio
/// series skip those with a warning instead of aborting.
struct LambdaPoint {
  int t = 0;      // 1-based period index
  double u = 0.0; // tau_t
  double lambda = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0; // ||Sigma(u) v - lambda v||_2 from the eigensolver
  bool degenerate = false;
};

struct LambdaCurve {
  std::vector<LambdaPoint> entries;
};

/// Consecutive-period eigenvalue ratio R_{t+1,t} = lambda_{tau_{t+1}} / lambda_{tau_t}.
struct RSample {
  int t = 0; // denominator period; ratio pairs (t, t+1)
  double value = 0.0;
};

struct RSeries {
  std::vector<RSample> entries;
  int n_undefined = 0; // ratios skipped because the denominator eigenvalue was zero
};

/// Per-unit loading ratios Q_{u,i,ref} = l_{u,i} / l_{u,ref} at one evaluation
/// period. `defined` is false when the reference loading was numerically zero.
struct QColumn {
  int t = 0;
  double u = 0.0;
  std::vector<double> q; // length N, q[reference] == 1 when defined
  bool defined = true;
};

struct QSeries {
  int reference = 0; // 0-based unit index
  std::vector<QColumn> columns;
};

struct RollingRow {
  int end_t = 0; // 1-based global index of the window's last day
  std::string end_date;
  double a_hat = 0.0;
  double r_bar = 0.0;
  bool degenerate = false;
};

enum class BandwidthPolicy { fixed_h, per_window_cv };
enum class TrendModel { model1, model2 };

/// One full estimation pass at a single bandwidth: the exponent, the curve
/// it came from, both ratio diagnostics, and the evaluation set used. R
/// entries are positive by construction; every defined Q column has a unit
/// entry at the reference.
struct EstimationReport {
  double a_hat = 0.0;
  double h_used = 0.0;
  EvaluationSet c_set;
  LambdaCurve curve;
  RSeries r;
  QSeries q;
  TrendModel model = TrendModel::model1;
};

/// Local-constant peak estimate per unit: gamma_hat is the maximum of the
/// smoothed active series, argmax_t its 1-based period index.
struct PeakEstimate {
  std::vector<double> gamma_hat;
  std::vector<int> argmax_t;
};

/// Top eigenpair of sigma(panel, spec, tau_t) for every t in the evaluation
/// set, ordered by t. Window or convergence failures are rethrown with the
/// offending period attached.
LambdaCurve lambda_curve(const Panel& panel, const KernelSpec& spec,
                         const EvaluationSet& c_set);

/// Trend exponent estimate ln(mean lambda) / (2 ln T).
/// Throws std::runtime_error("degenerate spectrum") when mean lambda <= 0.
double a_hat(const LambdaCurve& curve, int t_count);

/// Ratios for consecutive index pairs present in the curve.
RSeries r_series(const LambdaCurve& curve);

/// Loading ratios against the reference unit at every curve period.
QSeries q_ratios(const LambdaCurve& curve, int reference);

/// Benchmark-unit rule: argmax of the raw daily increase on the final day,
/// ties broken alphabetically by unit id. Returns a 0-based index.
int select_reference(const std::vector<double>& final_day_counts,
                     const std::vector<std::string>& unit_ids);

/// Re-estimates (a_hat, r_bar) over every `window`-day span, sliding one day
/// at a time. Each window is treated as its own panel with T = window and
/// evaluation set {window-4, ..., window}; r_bar averages the four
/// consecutive ratios. Rows with a vanished eigenvalue are flagged, not
/// dropped. Under per_window_cv the bandwidth is re-selected inside each
/// window on `cv_grid`; under fixed_h the spec's bandwidth is reused.
std::vector<RollingRow> rolling_windows(const Panel& panel, int window,
                                        const KernelSpec& spec,
                                        BandwidthPolicy policy = BandwidthPolicy::fixed_h,
                                        const std::vector<double>& cv_grid = {});

/// Extracts the panel slice [first_t, first_t + window - 1] as a standalone
/// panel with its own 1-based grid; unit starts clamp into the window.
Panel window_slice(const Panel& panel, int first_t, int window);

/// Peaked-trajectory transform: gamma_hat_i = max of the smoothed active
/// series of unit i, y*_it = gamma_hat_i - y_it on active periods (zero
/// before the start). The transformed panel feeds the standard pipeline.
std::pair<Panel, PeakEstimate> peak_transform(const Panel& panel, const KernelSpec& spec);

/// Full pass over an already-prepared panel: curve, exponent, R, and Q
/// against `reference`. The caller handles the model-2 transform (this
/// routine is transform-agnostic) and records which model fed the panel.
EstimationReport estimate(const Panel& panel, const KernelSpec& spec,
                          const EvaluationSet& c_set, int reference,
                          TrendModel model = TrendModel::model1);

} // namespace paneltrend

#endif // PANELTREND_ESTIMATORS_HPP
