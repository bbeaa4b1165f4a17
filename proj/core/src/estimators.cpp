#include "paneltrend/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "paneltrend/bandwidth.hpp"

namespace paneltrend {

LambdaCurve lambda_curve(const Panel& panel, const KernelSpec& spec,
                         const EvaluationSet& c_set) {
  if (c_set.indices.empty()) {
    throw std::invalid_argument("lambda_curve: evaluation set is empty");
  }
  LambdaCurve curve;
  curve.entries.reserve(c_set.indices.size());
  for (int t : c_set.indices) {
    try {
      LocalCovariance cov = sigma(panel, spec, panel.tau(t));
      EigenPair pair = top_eigenpair(cov.matrix);
      LambdaPoint point;
      point.t = t;
      point.u = cov.u;
      point.lambda = pair.lambda;
      point.vector = std::move(pair.vector);
      point.residual = pair.residual;
      point.degenerate = !(pair.lambda > 0.0);
      curve.entries.push_back(std::move(point));
    } catch (const std::exception& e) {
      throw std::runtime_error("lambda_curve at t=" + std::to_string(t) + ": " + e.what());
    }
  }
  return curve;
}

double a_hat(const LambdaCurve& curve, int t_count) {
  if (curve.entries.empty()) {
    throw std::invalid_argument("a_hat: empty lambda curve");
  }
  if (t_count < 2) {
    throw std::invalid_argument("a_hat: T must be at least 2");
  }
  double mean = 0.0;
  for (const LambdaPoint& p : curve.entries) mean += p.lambda;
  mean /= static_cast<double>(curve.entries.size());
  if (!(mean > 0.0)) {
    throw std::runtime_error("degenerate spectrum");
  }
  return std::log(mean) / (2.0 * std::log(static_cast<double>(t_count)));
}

RSeries r_series(const LambdaCurve& curve) {
  if (curve.entries.size() < 2) {
    throw std::invalid_argument("r_series: need at least two curve entries");
  }
  RSeries out;
  for (std::size_t k = 0; k + 1 < curve.entries.size(); ++k) {
    const LambdaPoint& lo = curve.entries[k];
    const LambdaPoint& hi = curve.entries[k + 1];
    if (hi.t != lo.t + 1) continue; // only consecutive periods form a ratio
    if (!(lo.lambda > 0.0) || !(hi.lambda > 0.0)) {
      ++out.n_undefined;
      continue;
    }
    out.entries.push_back(RSample{lo.t, hi.lambda / lo.lambda});
  }
  return out;
}

QSeries q_ratios(const LambdaCurve& curve, int reference) {
  if (curve.entries.empty()) {
    throw std::invalid_argument("q_ratios: empty lambda curve");
  }
  const int n = static_cast<int>(curve.entries.front().vector.size());
  if (reference < 0 || reference >= n) {
    throw std::invalid_argument("q_ratios: reference unit out of range");
  }
  QSeries out;
  out.reference = reference;
  out.columns.reserve(curve.entries.size());
  for (const LambdaPoint& p : curve.entries) {
    QColumn col;
    col.t = p.t;
    col.u = p.u;
    col.q.resize(n);
    const double ref_loading = p.vector(reference);
    if (std::abs(ref_loading) < 1e-12) {
      col.defined = false;
      std::fill(col.q.begin(), col.q.end(), std::numeric_limits<double>::quiet_NaN());
    } else {
      for (int i = 0; i < n; ++i) col.q[i] = p.vector(i) / ref_loading;
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

int select_reference(const std::vector<double>& final_day_counts,
                     const std::vector<std::string>& unit_ids) {
  if (final_day_counts.empty() || final_day_counts.size() != unit_ids.size()) {
    throw std::invalid_argument("select_reference: bad inputs");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(final_day_counts.size()); ++i) {
    if (final_day_counts[i] > final_day_counts[best] ||
        (final_day_counts[i] == final_day_counts[best] && unit_ids[i] < unit_ids[best])) {
      best = i;
    }
  }
  return best;
}

Panel window_slice(const Panel& panel, int first_t, int window) {
  const int t_count = panel.n_periods();
  if (window < 2 || first_t < 1 || first_t + window - 1 > t_count) {
    throw std::invalid_argument("window_slice: window out of range");
  }
  Panel out;
  out.values = panel.values.middleCols(first_t - 1, window);
  out.unit_ids = panel.unit_ids;
  out.region = panel.region;
  out.starts.resize(panel.n_units());
  for (int i = 0; i < panel.n_units(); ++i) {
    out.starts[i] = std::clamp(panel.starts[i] - first_t + 1, 1, window);
  }
  if (!panel.time_labels.empty()) {
    out.time_labels.assign(panel.time_labels.begin() + (first_t - 1),
                           panel.time_labels.begin() + (first_t - 1) + window);
  }
  return out;
}

std::vector<RollingRow> rolling_windows(const Panel& panel, int window,
                                        const KernelSpec& spec,
                                        BandwidthPolicy policy,
                                        const std::vector<double>& cv_grid) {
  const int t_count = panel.n_periods();
  if (window < 6) {
    throw std::invalid_argument("rolling_windows: window must have at least 6 days");
  }
  if (window > t_count) {
    throw std::runtime_error("rolling_windows: fewer days than one full window");
  }

  // Trailing five periods of each window form its evaluation set.
  EvaluationSet c_window;
  c_window.rule = EvalRule::explicit_margin;
  for (int t = window - 4; t <= window; ++t) c_window.indices.push_back(t);

  std::vector<RollingRow> rows;
  rows.reserve(t_count - window + 1);
  for (int first = 1; first + window - 1 <= t_count; ++first) {
    const int end_t = first + window - 1;
    Panel slice = window_slice(panel, first, window);

    KernelSpec wspec = spec;
    if (policy == BandwidthPolicy::per_window_cv) {
      const std::vector<double> grid = cv_grid.empty() ? default_grid(window) : cv_grid;
      wspec.h = select_bandwidth(slice, grid, c_window, spec.boundary).h_hat;
    }

    RollingRow row;
    row.end_t = end_t;
    if (!panel.time_labels.empty()) row.end_date = panel.time_labels[end_t - 1];

    LambdaCurve curve = lambda_curve(slice, wspec, c_window);
    bool degenerate = false;
    for (const LambdaPoint& p : curve.entries) degenerate |= p.degenerate;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.a_hat = nan;
    row.r_bar = nan;
    if (!degenerate) {
      row.a_hat = a_hat(curve, window);
      RSeries rs = r_series(curve);
      double sum = 0.0;
      for (const RSample& s : rs.entries) sum += s.value;
      row.r_bar = sum / static_cast<double>(rs.entries.size());
    }
    row.degenerate = degenerate;
    rows.push_back(std::move(row));
  }
  return rows;
}

EstimationReport estimate(const Panel& panel, const KernelSpec& spec,
                          const EvaluationSet& c_set, int reference, TrendModel model) {
  EstimationReport report;
  report.h_used = spec.h;
  report.c_set = c_set;
  report.model = model;
  report.curve = lambda_curve(panel, spec, c_set);
  report.a_hat = a_hat(report.curve, panel.n_periods());
  report.r = r_series(report.curve);
  report.q = q_ratios(report.curve, reference);
  return report;
}

std::pair<Panel, PeakEstimate> peak_transform(const Panel& panel, const KernelSpec& spec) {
  panel.validate();
  const int t_count = panel.n_periods();
  PeakEstimate peaks;
  peaks.gamma_hat.resize(panel.n_units());
  peaks.argmax_t.resize(panel.n_units());

  Panel out = panel;
  for (int i = 0; i < panel.n_units(); ++i) {
    const int start = panel.starts[i];
    if (t_count - start + 1 < 3) {
      throw std::invalid_argument("peak_transform: unit " + panel.unit_ids[i] +
                                  " has fewer than 3 active observations");
    }
    std::vector<double> series(t_count);
    for (int t = 1; t <= t_count; ++t) series[t - 1] = panel.values(i, t - 1);
    std::vector<int> grid;
    grid.reserve(t_count - start + 1);
    for (int t = start; t <= t_count; ++t) grid.push_back(t);

    std::vector<double> smoothed;
    try {
      smoothed = local_constant_smooth(series, start, spec, grid);
    } catch (const std::exception& e) {
      throw std::runtime_error("peak_transform: unit " + panel.unit_ids[i] + ": " + e.what());
    }
    int best = 0;
    for (int k = 1; k < static_cast<int>(smoothed.size()); ++k) {
      if (smoothed[k] > smoothed[best]) best = k;
    }
    peaks.gamma_hat[i] = smoothed[best];
    peaks.argmax_t[i] = grid[best];

    for (int t = start; t <= t_count; ++t) {
      out.values(i, t - 1) = peaks.gamma_hat[i] - panel.values(i, t - 1);
    }
  }
  return {std::move(out), std::move(peaks)};
}

} // namespace paneltrend
