#include "paneltrend/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace paneltrend {

namespace {

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument("matrix is not symmetric");
      }
    }
  }
}

} // namespace

void fix_sign(Eigen::VectorXd& v) {
  const double s = v.sum();
  if (std::abs(s) > 1e-12) {
    if (s < 0.0) v = -v;
    return;
  }
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

EigenPair top_eigenpair(const Eigen::MatrixXd& matrix, double tol, int max_iter) {
  require_symmetric(matrix);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");

  const int n = static_cast<int>(matrix.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

  double lambda = v.dot(matrix * v);
  double residual = (matrix * v - lambda * v).norm();
  bool converged = false;
  int iter = 0;
  while (iter < max_iter) {
    Eigen::VectorXd w = matrix * v;
    const double wnorm = w.norm();
    if (wnorm == 0.0) {
      if (matrix.cwiseAbs().maxCoeff() == 0.0) {
        lambda = 0.0;
        residual = 0.0;
        converged = true;
        break;
      }
      // the start vector landed exactly in the null space; restart from the
      // strongest column direction, which cannot be annihilated again
      int pivot = 0;
      matrix.colwise().norm().maxCoeff(&pivot);
      v = Eigen::VectorXd::Zero(n);
      v(pivot) = 1.0;
      lambda = v.dot(matrix * v);
      ++iter;
      continue;
    }
    v = w / wnorm;
    const double lambda_next = v.dot(matrix * v);
    residual = (matrix * v - lambda_next * v).norm();
    const double scale = std::max(std::abs(lambda_next), 1.0);
    const bool rayleigh_settled = std::abs(lambda_next - lambda) <= tol * scale;
    lambda = lambda_next;
    ++iter;
    if (rayleigh_settled && residual <= 1e-12 * scale) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    // stagnation: the top two eigenvalues are too close for power iteration
    if (n <= 64) {
      SpectralDecomposition full = full_spectrum(matrix);
      EigenPair out;
      out.lambda = full.eigenvalues.back();
      out.vector = full.eigenvectors.col(n - 1);
      fix_sign(out.vector);
      out.iterations = iter;
      out.residual = (matrix * out.vector - out.lambda * out.vector).norm();
      return out;
    }
    std::ostringstream msg;
    msg << "top_eigenpair: no convergence after " << max_iter
        << " iterations (best lambda " << lambda << ", residual " << residual << ")";
    throw std::runtime_error(msg.str());
  }

  fix_sign(v);
  EigenPair out;
  out.lambda = lambda;
  out.vector = v;
  out.iterations = iter;
  out.residual = (matrix * v - lambda * v).norm();
  return out;
}

SpectralDecomposition full_spectrum(const Eigen::MatrixXd& matrix) {
  require_symmetric(matrix);
  const int n = static_cast<int>(matrix.rows());
  if (n > 64) {
    throw std::invalid_argument("oracle is desk-scale only");
  }

  Eigen::MatrixXd a = (matrix + matrix.transpose()) / 2.0;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);

  const double frob = std::max(a.norm(), 1e-300);
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
    }
    if (std::sqrt(2.0 * off) <= 1e-15 * frob) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const double apq = a(p, r);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(r, r);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, r);
          a(k, p) = c * akp - s * akq;
          a(k, r) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(r, k);
          a(p, k) = c * apk - s * aqk;
          a(r, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkq = q(k, r);
          q(k, p) = c * qkp - s * qkq;
          q(k, r) = s * qkp + c * qkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&a](int i, int j) { return a(i, i) < a(j, j); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    out.eigenvectors.col(k) = q.col(order[k]);
  }
  return out;
}

std::vector<double> full_spectrum_oracle(const Eigen::MatrixXd& matrix) {
  return full_spectrum(matrix).eigenvalues;
}

} // namespace paneltrend
