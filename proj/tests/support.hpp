#pragma once

#include <random>

#include "qbc/channels.hpp"

namespace test_support {

/// Random separable two-qubit state, locally filtered on A so that tr_B = I/2.
/// Its channel is entanglement-breaking.
inline qbc::ChoiState random_separable_choi(std::mt19937_64& rng) {
  using qbc::Matrix;
  Matrix sigma = Matrix::Zero(4, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  for (int t = 0; t < 4; ++t) {
    const double w = u(rng);
    const Matrix a = qbc::haar_pure(qbc::HilbertSpec::qubit(), rng).density().matrix();
    const Matrix b = qbc::haar_pure(qbc::HilbertSpec::qubit(), rng).density().matrix();
    sigma += w * qbc::kron(a, b);
    total += w;
  }
  sigma /= total;
  Matrix s(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s(i, j) = sigma(2 * i, 2 * j) + sigma(2 * i + 1, 2 * j + 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix m = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                   es.eigenvectors().adjoint() / std::sqrt(2.0);
  const Matrix filter = qbc::kron(m, Matrix::Identity(2, 2));
  return qbc::ChoiState(filter * sigma * filter.adjoint(), 2, 2);
}

}  // namespace test_support
