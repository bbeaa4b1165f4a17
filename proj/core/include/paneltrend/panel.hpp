#ifndef PANELTREND_PANEL_HPP
#define PANELTREND_PANEL_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace paneltrend {

enum class Region { AF, AM, AO, EU, Custom };

std::string region_name(Region r);
Region region_from_string(const std::string& s);

/// Normalized time grid tau_t = t/T, with t counted from 1.
struct TimeGrid {
  int n_periods = 0;

  explicit TimeGrid(int t_count) : n_periods(t_count) {}
  double tau(int t) const { return static_cast<double>(t) / n_periods; }
  int size() const { return n_periods; }
};

/// Unbalanced panel of transformed daily counts. values(i, t-1) holds the
/// transformed observation of unit i at period t; entries before a unit's
/// start index are structural zeros, so downstream weighted sums need no
/// masking.
struct Panel {
  Eigen::MatrixXd values;               // N x T
  std::vector<int> starts;              // 1-based first active period per unit
  std::vector<std::string> unit_ids;    // ISO 3166-1 alpha-3 codes
  std::vector<std::string> time_labels; // calendar dates, ISO-8601
  Region region = Region::Custom;

  int n_units() const { return static_cast<int>(values.rows()); }
  int n_periods() const { return static_cast<int>(values.cols()); }
  TimeGrid grid() const { return TimeGrid(n_periods()); }
  double tau(int t) const { return static_cast<double>(t) / n_periods(); }

  /// Throws std::invalid_argument if any structural invariant is violated
  /// (shape mismatches, starts out of range, nonzero pre-start entries,
  /// duplicate unit ids).
  void validate() const;
};

enum class EvalRule { quarter_trim, log_n_count, explicit_margin };

/// Subset of {1..T} on which eigenpairs are trusted; always a sorted,
/// non-empty suffix-like index list.
struct EvaluationSet {
  std::vector<int> indices; // 1-based, ascending
  EvalRule rule = EvalRule::quarter_trim;

  int size() const { return static_cast<int>(indices.size()); }
};

enum class Transform { case1, case2 };

/// One unit's daily counts aligned to the panel's common calendar span.
/// start is 1-based; counts before it are ignored by the log transform.
struct UnitSeries {
  std::string unit_id;
  std::vector<double> counts;
  int start = 1;
};

/// Log-transforms per-unit count series into a Panel.
/// case1: ln(count+1); case2: ln((count+1)/density_i). Negative counts are
/// clamped to zero before the transform; units with non-finite counts or
/// (under case2) a missing density are rejected with a named error.
Panel build_panel(const std::vector<UnitSeries>& series,
                  const std::vector<std::string>& time_labels,
                  Transform transform,
                  const std::vector<std::optional<double>>& densities = {},
                  Region region = Region::Custom);

/// Builds the evaluation set for a panel.
///  quarter_trim     -> { floor(T/4)+1, ..., T }
///  log_n_count      -> { t : #{i : starts[i] <= t} >= N - ln N }
///  explicit_margin  -> { max_i starts[i] - margin, ..., T } clipped to 1..T
EvaluationSet eval_set(const Panel& panel, EvalRule rule,
                       std::optional<int> margin = std::nullopt);

/// Multiplies all active entries by c > 0; starts are unchanged.
Panel rescale(const Panel& panel, double c);

} // namespace paneltrend

#endif // PANELTREND_PANEL_HPP
