#ifndef PANELTREND_SPECTRAL_HPP
#define PANELTREND_SPECTRAL_HPP

#include <Eigen/Core>
#include <vector>

namespace paneltrend {

/// Leading eigenpair of a symmetric PSD matrix. The vector is unit-norm with
/// a deterministic orientation: the entry sum is nonnegative, falling back to
/// a positive largest-magnitude entry when the sum is within 1e-12 of zero.
struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  double residual = 0.0; // ||M v - lambda v||_2
};

/// Power iteration from the fixed start (1,...,1)/sqrt(N), stopping when the
/// Rayleigh quotient stabilizes to `tol` and the residual drops below
/// 1e-12 * max(lambda, 1). When the iteration stalls (top eigenvalues too
/// close), falls back to the full Jacobi decomposition for N <= 64 and
/// throws otherwise, carrying the best iterate in the message.
EigenPair top_eigenpair(const Eigen::MatrixXd& matrix, double tol = 1e-12,
                        int max_iter = 10000);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors(:, k) pairs with eigenvalues[k].
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Desk-scale only (N <= 64); throws beyond that.
SpectralDecomposition full_spectrum(const Eigen::MatrixXd& matrix);

/// All eigenvalues, ascending.
std::vector<double> full_spectrum_oracle(const Eigen::MatrixXd& matrix);

/// Applies the orientation rule above in place.
void fix_sign(Eigen::VectorXd& v);

} // namespace paneltrend

#endif // PANELTREND_SPECTRAL_HPP
