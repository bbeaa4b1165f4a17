#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "paneltrend/spectral.hpp"

using namespace paneltrend;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = unif(rng);
  }
  return a * a.transpose();
}

} // namespace

TEST_CASE("diagonal matrix") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const EigenPair p = top_eigenpair(m);
  CHECK(p.lambda == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(p.vector(0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(p.vector(1)) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(p.residual <= 1e-10 * std::max(p.lambda, 1.0));
}

TEST_CASE("rank-one outer product") {
  Eigen::VectorXd g(2);
  g << 3.0, 4.0;
  const EigenPair p = top_eigenpair(g * g.transpose());
  CHECK(p.lambda == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(p.vector(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p.vector(1) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("random PSD matrices match the full decomposition") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd m = random_psd(rng, 5);
    const EigenPair p = top_eigenpair(m);
    CHECK(std::abs(p.vector.norm() - 1.0) < 1e-12);
    const SpectralDecomposition full = full_spectrum(m);
    CHECK(std::abs(p.lambda - full.eigenvalues.back()) <=
          1e-10 * std::max(1.0, full.eigenvalues.back()));
    const Eigen::VectorXd oracle = full.eigenvectors.col(4);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(std::abs(p.vector(i)) - std::abs(oracle(i))) < 1e-8);
    }
  }
}

TEST_CASE("full spectrum basics") {
  CHECK(full_spectrum_oracle(Eigen::MatrixXd::Identity(3, 3)) ==
        std::vector<double>{1.0, 1.0, 1.0});

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = -1.0;
  d(1, 1) = 0.0;
  d(2, 2) = 5.0;
  const std::vector<double> eigs = full_spectrum_oracle(d);
  CHECK(eigs[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eigs[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eigs[2] == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("full spectrum trace and residual checks") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 10);
    Eigen::MatrixXd a(n, n);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        a(i, j) = unif(rng);
        a(j, i) = a(i, j);
      }
    }
    const SpectralDecomposition full = full_spectrum(a);
    double sum = 0.0;
    for (double v : full.eigenvalues) sum += v;
    CHECK(sum == doctest::Approx(a.trace()).epsilon(1e-10));
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXd v = full.eigenvectors.col(k);
      CHECK((a * v - full.eigenvalues[k] * v).norm() <= 1e-10 * a.norm());
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // ascending order
    for (int k = 1; k < n; ++k) CHECK(full.eigenvalues[k] >= full.eigenvalues[k - 1]);
  }
}

TEST_CASE("oracle refuses matrices beyond desk scale") {
  CHECK_THROWS_WITH_AS(full_spectrum_oracle(Eigen::MatrixXd::Identity(65, 65)),
                       doctest::Contains("desk-scale"), std::invalid_argument);
}

TEST_CASE("positive scaling moves the eigenvalue, not the vector") {
  std::mt19937_64 rng(77);
  const Eigen::MatrixXd m = random_psd(rng, 6);
  const EigenPair base = top_eigenpair(m);
  const EigenPair scaled = top_eigenpair(3.0 * m);
  CHECK(scaled.lambda == doctest::Approx(3.0 * base.lambda).epsilon(1e-12));
  for (int i = 0; i < 6; ++i) {
    CHECK(scaled.vector(i) == doctest::Approx(base.vector(i)).epsilon(1e-9));
  }
}

TEST_CASE("lambda dominates every diagonal entry of a PSD matrix") {
  std::mt19937_64 rng(78);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd m = random_psd(rng, 4);
    const EigenPair p = top_eigenpair(m);
    CHECK(p.lambda >= m.diagonal().maxCoeff() - 1e-12 * p.lambda);
  }
}

TEST_CASE("deterministic output") {
  std::mt19937_64 rng(79);
  const Eigen::MatrixXd m = random_psd(rng, 8);
  const EigenPair a = top_eigenpair(m);
  const EigenPair b = top_eigenpair(m);
  CHECK(a.lambda == b.lambda);
  CHECK(a.iterations == b.iterations);
  CHECK(a.vector == b.vector);
}

TEST_CASE("sign convention") {
  Eigen::VectorXd g(3);
  g << 1.0, 2.0, 2.0;
  const EigenPair pos = top_eigenpair(g * g.transpose());
  CHECK(pos.vector.sum() > 0.0);

  // balanced vector: sum is zero, so the largest-magnitude entry goes positive
  Eigen::VectorXd b(2);
  b << 1.0, -1.0;
  const EigenPair bal = top_eigenpair(b * b.transpose());
  CHECK(bal.vector(0) > 0.0);
  CHECK(bal.vector(1) < 0.0);
}

TEST_CASE("zero matrix yields the flat start vector with lambda zero") {
  const EigenPair p = top_eigenpair(Eigen::MatrixXd::Zero(4, 4));
  CHECK(p.lambda == 0.0);
  CHECK(p.residual == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(p.vector(i) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(top_eigenpair(m), std::invalid_argument);
  CHECK_THROWS_AS(full_spectrum(m), std::invalid_argument);
}

TEST_CASE("stalled iteration falls back to the full decomposition") {
  // +1/-1 eigenvalues never settle under power iteration from a mixed start
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  const EigenPair p = top_eigenpair(m, 1e-12, 50);
  CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.vector(0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.residual <= 1e-10);
}

TEST_CASE("non-convergence beyond oracle scale carries the best iterate") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(65, 65);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  CHECK_THROWS_WITH_AS(top_eigenpair(m, 1e-12, 20), doctest::Contains("no convergence"),
                       std::runtime_error);
}
