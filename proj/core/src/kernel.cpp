#include "paneltrend/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace paneltrend {

void KernelSpec::validate() const {
  if (!(h > 0.0) || h > 1.0) {
    throw std::invalid_argument("kernel bandwidth must lie in (0, 1]");
  }
}

double epanechnikov(double w) {
  if (std::abs(w) > 1.0) return 0.0;
  return 0.75 * (1.0 - w * w);
}

double epanechnikov_mass(double z) {
  if (z <= -1.0) return 0.0;
  if (z >= 1.0) return 1.0;
  // antiderivative 0.75*(w - w^3/3), shifted so the mass at -1 is zero
  return 0.75 * (z - z * z * z / 3.0) + 0.5;
}

double kernel_weight(const KernelSpec& spec, double tau, double u) {
  spec.validate();
  const double w = (tau - u) / spec.h;
  double k = epanechnikov(w);
  if (k == 0.0) return 0.0;
  if (spec.boundary == BoundaryRule::right_adjusted && u > 1.0 - spec.h) {
    k /= epanechnikov_mass((1.0 - u) / spec.h);
  }
  return k / spec.h;
}

std::vector<double> local_constant_smooth(const std::vector<double>& series,
                                          int active_from,
                                          const KernelSpec& spec,
                                          const std::vector<int>& grid) {
  spec.validate();
  const int t_count = static_cast<int>(series.size());
  if (active_from < 1 || active_from > t_count) {
    throw std::invalid_argument("local_constant_smooth: active_from out of range");
  }
  std::vector<double> out;
  out.reserve(grid.size());
  for (int g : grid) {
    if (g < active_from || g > t_count) {
      throw std::invalid_argument("local_constant_smooth: grid index outside active range");
    }
    const double u = static_cast<double>(g) / t_count;
    double mass = 0.0;
    double acc = 0.0;
    for (int t = active_from; t <= t_count; ++t) {
      const double w = kernel_weight(spec, static_cast<double>(t) / t_count, u);
      mass += w;
      acc += w * series[t - 1];
    }
    if (!(mass > 0.0)) {
      throw std::runtime_error("bandwidth too small");
    }
    out.push_back(acc / mass);
  }
  return out;
}

} // namespace paneltrend
