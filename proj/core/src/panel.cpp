#include "paneltrend/panel.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace paneltrend {

std::string region_name(Region r) {
  switch (r) {
    case Region::AF: return "AF";
    case Region::AM: return "AM";
    case Region::AO: return "AO";
    case Region::EU: return "EU";
    case Region::Custom: return "custom";
  }
  return "custom";
}

Region region_from_string(const std::string& s) {
  if (s == "AF") return Region::AF;
  if (s == "AM") return Region::AM;
  if (s == "AO") return Region::AO;
  if (s == "EU") return Region::EU;
  if (s == "custom") return Region::Custom;
  throw std::invalid_argument("unknown region: " + s);
}

void Panel::validate() const {
  const int n = n_units();
  const int t_count = n_periods();
  if (n < 1 || t_count < 2) {
    throw std::invalid_argument("panel requires N >= 1 and T >= 2");
  }
  if (static_cast<int>(starts.size()) != n) {
    throw std::invalid_argument("starts length does not match unit count");
  }
  if (static_cast<int>(unit_ids.size()) != n) {
    throw std::invalid_argument("unit_ids length does not match unit count");
  }
  if (!time_labels.empty() && static_cast<int>(time_labels.size()) != t_count) {
    throw std::invalid_argument("time_labels length does not match period count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : unit_ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("duplicate unit id: " + id);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (starts[i] < 1 || starts[i] > t_count) {
      throw std::invalid_argument("start index out of range for unit " + unit_ids[i]);
    }
    for (int t = 1; t < starts[i]; ++t) {
      if (values(i, t - 1) != 0.0) {
        throw std::invalid_argument("nonzero value before start for unit " + unit_ids[i]);
      }
    }
    for (int t = 0; t < t_count; ++t) {
      if (!std::isfinite(values(i, t))) {
        throw std::invalid_argument("non-finite value for unit " + unit_ids[i]);
      }
    }
  }
}

Panel build_panel(const std::vector<UnitSeries>& series,
                  const std::vector<std::string>& time_labels,
                  Transform transform,
                  const std::vector<std::optional<double>>& densities,
                  Region region) {
  if (series.empty()) {
    throw std::invalid_argument("build_panel: no unit series given");
  }
  const int t_count = static_cast<int>(series.front().counts.size());
  for (const auto& s : series) {
    if (static_cast<int>(s.counts.size()) != t_count) {
      throw std::invalid_argument(
          "build_panel: series are not aligned to a common span (unit " + s.unit_id + ")");
    }
  }
  if (!densities.empty() && densities.size() != series.size()) {
    throw std::invalid_argument("build_panel: densities length does not match series");
  }

  const int n = static_cast<int>(series.size());
  Panel panel;
  panel.values = Eigen::MatrixXd::Zero(n, t_count);
  panel.starts.resize(n);
  panel.unit_ids.resize(n);
  panel.time_labels = time_labels;
  panel.region = region;

  for (int i = 0; i < n; ++i) {
    const UnitSeries& s = series[i];
    double divisor = 1.0;
    if (transform == Transform::case2) {
      if (densities.empty() || !densities[i].has_value()) {
        throw std::invalid_argument("build_panel: case2 requires a density for unit " + s.unit_id);
      }
      divisor = *densities[i];
      if (!(divisor > 0.0)) {
        throw std::invalid_argument("build_panel: non-positive density for unit " + s.unit_id);
      }
    }
    if (s.start < 1 || s.start > t_count) {
      throw std::invalid_argument("build_panel: start out of range for unit " + s.unit_id);
    }
    panel.starts[i] = s.start;
    panel.unit_ids[i] = s.unit_id;
    for (int t = s.start; t <= t_count; ++t) {
      double c = s.counts[t - 1];
      if (!std::isfinite(c)) {
        throw std::invalid_argument("build_panel: non-finite count for unit " + s.unit_id);
      }
      if (c < 0.0) c = 0.0; // data corrections show up as negative daily counts
      panel.values(i, t - 1) = std::log((c + 1.0) / divisor);
    }
  }
  panel.validate();
  return panel;
}

EvaluationSet eval_set(const Panel& panel, EvalRule rule, std::optional<int> margin) {
  panel.validate();
  const int t_count = panel.n_periods();
  const int n = panel.n_units();
  EvaluationSet out;
  out.rule = rule;

  switch (rule) {
    case EvalRule::quarter_trim: {
      for (int t = t_count / 4 + 1; t <= t_count; ++t) out.indices.push_back(t);
      break;
    }
    case EvalRule::log_n_count: {
      const double threshold = n - std::log(static_cast<double>(n));
      for (int t = 1; t <= t_count; ++t) {
        int started = 0;
        for (int i = 0; i < n; ++i) {
          if (panel.starts[i] <= t) ++started;
        }
        if (started >= threshold) out.indices.push_back(t);
      }
      break;
    }
    case EvalRule::explicit_margin: {
      const int m = margin.value_or(0);
      if (m < 0) throw std::invalid_argument("eval_set: margin must be nonnegative");
      int max_start = 1;
      for (int s : panel.starts) max_start = std::max(max_start, s);
      const int first = std::max(1, max_start - m);
      for (int t = first; t <= t_count; ++t) out.indices.push_back(t);
      break;
    }
  }
  if (out.indices.empty()) {
    throw std::runtime_error("evaluation set empty");
  }
  return out;
}

Panel rescale(const Panel& panel, double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("rescale: c must be positive");
  }
  Panel out = panel;
  out.values *= c; // pre-start entries are zero, so scaling keeps them zero
  return out;
}

} // namespace paneltrend
