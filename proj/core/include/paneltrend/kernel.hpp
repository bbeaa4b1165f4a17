#ifndef PANELTREND_KERNEL_HPP
#define PANELTREND_KERNEL_HPP

#include <vector>

namespace paneltrend {

enum class KernelFamily { epanechnikov };
enum class BoundaryRule { right_adjusted, none };

/// Kernel choice for all local averaging. Only the Epanechnikov family is
/// shipped; the right-boundary adjustment renormalizes the kernel so its
/// weights still integrate to one for evaluation points u in (1-h, 1].
/// There is no left-boundary branch: the evaluation set keeps u away from 0.
struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double h = 0.2;
  BoundaryRule boundary = BoundaryRule::right_adjusted;

  /// Throws std::invalid_argument unless 0 < h <= 1.
  void validate() const;
};

/// Epanechnikov base kernel 0.75*(1 - w^2) on [-1, 1], zero outside.
double epanechnikov(double w);

/// Mass of the base kernel on [-1, z], in closed form (cubic antiderivative).
double epanechnikov_mass(double z);

/// Scaled kernel weight K_h(tau - u) = K((tau - u)/h)/h, with the
/// right-boundary renormalization applied for u in (1-h, 1] when the spec
/// asks for it. Total on valid inputs; nonnegative; zero for |tau - u| >= h.
double kernel_weight(const KernelSpec& spec, double tau, double u);

/// Nadaraya-Watson local-constant estimate of `series` over its active range
/// {active_from..T}, evaluated at the 1-based grid indices. Throws
/// std::runtime_error("bandwidth too small") if a grid point gets no weight.
std::vector<double> local_constant_smooth(const std::vector<double>& series,
                                          int active_from,
                                          const KernelSpec& spec,
                                          const std::vector<int>& grid);

} // namespace paneltrend

#endif // PANELTREND_KERNEL_HPP
