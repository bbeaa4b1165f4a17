#include "paneltrend/local_cov.hpp"

#include <cmath>
#include <stdexcept>

namespace paneltrend {

namespace {

LocalCovariance accumulate(const Panel& panel, const KernelSpec& spec, double u,
                           int skip_t) {
  spec.validate();
  if (!(u > 0.0) || u > 1.0) {
    throw std::invalid_argument("sigma: u must lie in (0, 1]");
  }
  const int n = panel.n_units();
  const int t_count = panel.n_periods();

  LocalCovariance out;
  out.u = u;
  out.matrix = Eigen::MatrixXd::Zero(n, n);

  // Periods outside |tau_t - u| < h contribute exactly zero weight.
  int t_lo = static_cast<int>(std::ceil((u - spec.h) * t_count));
  int t_hi = static_cast<int>(std::floor((u + spec.h) * t_count));
  t_lo = std::max(t_lo, 1);
  t_hi = std::min(t_hi, t_count);

  for (int t = t_lo; t <= t_hi; ++t) {
    if (t == skip_t) continue;
    const double w = kernel_weight(spec, panel.tau(t), u);
    if (w == 0.0) continue;
    out.effective_weight += w;
    out.matrix.noalias() += w * panel.values.col(t - 1) * panel.values.col(t - 1).transpose();
  }
  if (!(out.effective_weight > 0.0)) {
    throw std::runtime_error("no observations in window");
  }
  out.matrix /= static_cast<double>(n) * t_count;
  out.matrix = ((out.matrix + out.matrix.transpose()) / 2.0).eval();
  return out;
}

} // namespace

LocalCovariance sigma(const Panel& panel, const KernelSpec& spec, double u) {
  return accumulate(panel, spec, u, /*skip_t=*/0);
}

LocalCovariance sigma_loo(const Panel& panel, const KernelSpec& spec, int t_out) {
  if (t_out < 1 || t_out > panel.n_periods()) {
    throw std::invalid_argument("sigma_loo: t_out out of range");
  }
  return accumulate(panel, spec, panel.tau(t_out), t_out);
}

} // namespace paneltrend
