#ifndef PANELTREND_SYNTHETIC_HPP
#define PANELTREND_SYNTHETIC_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "paneltrend/panel.hpp"

namespace paneltrend {

/// Per-unit trend-level profile g_i(tau), strictly positive on [0, 1].
///   constant: g = p0
///   linear:   g = p0 * tau + p1                 (slope, intercept)
///   sinusoid: g = p2 + p0 * sin(2 pi tau / p1)  (amplitude, period, offset)
///   vee:      g = p1 + p2 * |tau - p0|          (center, floor, slope)
/// The vee profile dips at `center`, which places the maximum of a peaked
/// trajectory near center*T.
struct GProfile {
  enum class Kind { constant, linear, sinusoid, vee };
  Kind kind = Kind::constant;
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;

  double operator()(double tau) const;
  /// Throws std::invalid_argument unless the profile is strictly positive
  /// on [0, 1].
  void validate() const;

  static GProfile constant(double level) { return {Kind::constant, level, 0.0, 0.0}; }
  static GProfile linear(double slope, double intercept) {
    return {Kind::linear, slope, intercept, 0.0};
  }
  static GProfile sinusoid(double amplitude, double period, double offset) {
    return {Kind::sinusoid, amplitude, period, offset};
  }
  static GProfile vee(double center, double floor_level, double slope) {
    return {Kind::vee, center, floor_level, slope};
  }
};

enum class NoiseLaw { gaussian, none };
enum class Model { model1, model2 };

/// Ground-truth generator configuration. g_profiles, start_fractions, and
/// gamma may each hold a single element applied to every unit.
struct SyntheticSpec {
  int n_units = 0;
  int n_periods = 0;
  double a_true = 0.3; // in (0, 1)
  std::vector<GProfile> g_profiles{GProfile::constant(1.0)};
  std::vector<double> start_fractions{0.0}; // b_iT = floor(fraction * T) + 1
  double noise_sd = 0.0;
  NoiseLaw noise_law = NoiseLaw::none;
  Model model = Model::model1;
  std::vector<double> gamma; // required for model2
  std::uint64_t seed = 0;

  void validate() const;
  GProfile profile(int unit) const;
  double start_fraction(int unit) const;
  double gamma_of(int unit) const;
};

/// Everything the generator knew: exact trend values (zero before starts),
/// g_i evaluated on the tau grid, start indices, and the model parameters.
struct GroundTruth {
  double a_true = 0.0;
  std::vector<int> starts;
  Eigen::MatrixXd g_values; // N x T
  Eigen::MatrixXd trend;    // N x T, noiseless signal incl. gamma for model2
  std::vector<double> gamma;
};

/// Draws the panel. Noise streams are split per unit from the seed, so the
/// result does not depend on generation order. Unit ids are synthetic
/// three-letter codes; time labels start at 2020-01-01.
std::pair<Panel, GroundTruth> generate(const SyntheticSpec& spec);

/// Brute-force eigenvalue oracle: rebuilds Sigma(u) by direct summation from
/// the analytic trend values (its own kernel arithmetic, no shared smoothing
/// code) and extracts the top eigenvalue with the full Jacobi decomposition.
/// Noiseless specs only; N <= 64.
double oracle_lambda(const SyntheticSpec& spec, double h, double u);

/// Rounds the panel back to integer daily counts: count = round(e^y - 1),
/// clamped at zero, zero before each start.
Eigen::MatrixXd to_counts(const Panel& panel);

/// The panel a case-1 re-ingest of to_counts() would produce.
Panel quantize_to_counts(const Panel& panel);

/// Plain-text config round-trip for generator specs. parse_spec_config
/// reports errors as "<name>:<line>: <message>".
SyntheticSpec parse_spec_config(const std::string& text, const std::string& name = "spec");
std::string spec_to_config(const SyntheticSpec& spec);

} // namespace paneltrend

#endif // PANELTREND_SYNTHETIC_HPP
