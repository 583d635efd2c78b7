#pragma once

// Dense complex linear algebra shared by every module: Hermitian spectral
// helpers and index bookkeeping for tensor-product spaces.
//
// Subsystem ordering is row-major throughout: for dims {d0, d1, ..., dn} the
// basis index is i0*d1*...*dn + ... + in, so the first factor is the slowest.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qbc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

HermitianEigen eigh(const Matrix& hermitian);
RealVector eigvalsh(const Matrix& hermitian);
double min_eigenvalue(const Matrix& hermitian);

Matrix hermitian_part(const Matrix& m);
double max_abs(const Matrix& m);
bool all_finite(const Matrix& m);

/// Frobenius-nearest PSD matrix: negative eigenvalues clamped to zero.
Matrix psd_projection(const Matrix& hermitian);
/// Principal square root of a (numerically) PSD matrix; negative eigenvalues clamp to 0.
Matrix psd_sqrt(const Matrix& hermitian);
/// Sum of absolute eigenvalues.
double trace_norm(const Matrix& hermitian);

Matrix kron(const Matrix& a, const Matrix& b);

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)) on raw matrices, clamped to [0,1].
double fidelity_raw(const Matrix& rho, const Matrix& sigma);
double trace_distance_raw(const Matrix& rho, const Matrix& sigma);

/// Index arithmetic for a tensor product of subsystems.
class TensorLayout {
 public:
  explicit TensorLayout(std::vector<int> dims);

  const std::vector<int>& dims() const noexcept { return dims_; }
  std::size_t subsystems() const noexcept { return dims_.size(); }
  int total() const noexcept { return total_; }

  std::vector<int> digits(int index) const;
  int compose(std::span<const int> digits) const;

 private:
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_ = 1;
};

/// Trace out every subsystem not listed in `keep` (ascending, nonempty).
Matrix partial_trace(const Matrix& m, const TensorLayout& layout, std::span<const int> keep);
/// Transpose one tensor factor in the computational basis.
Matrix partial_transpose(const Matrix& m, const TensorLayout& layout, int subsystem);
/// `local` placed on subsystems `positions` (ascending), identity elsewhere.
Matrix embed(const Matrix& local, const TensorLayout& layout, std::span<const int> positions);

/// Deterministic pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace qbc
