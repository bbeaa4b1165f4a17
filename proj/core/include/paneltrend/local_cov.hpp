#ifndef PANELTREND_LOCAL_COV_HPP
#define PANELTREND_LOCAL_COV_HPP

#include <Eigen/Core>

#include "paneltrend/kernel.hpp"
#include "paneltrend/panel.hpp"

namespace paneltrend {

/// Kernel-weighted local second-moment matrix
///   Sigma(u) = (1/(N*T)) * sum_t Y_t Y_t' K_h(tau_t - u),
/// symmetrized as (M + M')/2. Accumulation runs in ascending t so repeated
/// evaluations are bitwise reproducible.
struct LocalCovariance {
  double u = 0.0;
  Eigen::MatrixXd matrix;      // N x N symmetric
  double effective_weight = 0.0; // total kernel mass over the window
};

/// Throws std::runtime_error("no observations in window") when no period
/// carries kernel weight at u.
LocalCovariance sigma(const Panel& panel, const KernelSpec& spec, double u);

/// Same as sigma at u = tau_{t_out} with the s == t_out term omitted; the
/// divisor stays N*T.
LocalCovariance sigma_loo(const Panel& panel, const KernelSpec& spec, int t_out);

} // namespace paneltrend

#endif // PANELTREND_LOCAL_COV_HPP
