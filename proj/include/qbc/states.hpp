#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qbc/linalg.hpp"

namespace qbc {

/// Ordered subsystem dimensions of a finite-dimensional Hilbert space.
class HilbertSpec {
 public:
  /// Entries must be >= 1 and the total dimension >= 2.
  explicit HilbertSpec(std::vector<int> dims);
  static HilbertSpec qubit() { return HilbertSpec({2}); }

  const std::vector<int>& dims() const noexcept { return dims_; }
  std::size_t subsystems() const noexcept { return dims_.size(); }
  int total() const noexcept;
  TensorLayout layout() const { return TensorLayout(dims_); }

  friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;

 private:
  std::vector<int> dims_;
};

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kNormTol = 1e-12;

/// Trace-one positive-semidefinite Hermitian matrix. Validated on construction
/// and immutable afterwards; the stored matrix is the Hermitian part of the input.
class DensityMatrix {
 public:
  DensityMatrix(HilbertSpec space, Matrix matrix);

  static DensityMatrix maximally_mixed(HilbertSpec space);
  static DensityMatrix basis_state(HilbertSpec space, int index);

  const HilbertSpec& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

 private:
  HilbertSpec space_;
  Matrix matrix_;
};

/// Unit vector in a Hilbert space.
class PureState {
 public:
  PureState(HilbertSpec space, Vector amplitudes);

  /// Qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
  static PureState bloch(double theta, double phi);

  const HilbertSpec& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  DensityMatrix density() const;

 private:
  HilbertSpec space_;
  Vector amplitudes_;
};

/// Non-squared Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0,1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// sqrt(<psi|sigma|psi>); equals fidelity(psi.density(), sigma).
double fidelity(const PureState& psi, const DensityMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Reduced state on the listed subsystems (any order; output keeps ascending order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);
/// Transpose on one factor. The result is Hermitian with unit trace but need not be PSD.
Matrix partial_transpose(const DensityMatrix& rho, int subsystem);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Haar-random pure state: normalized vector of i.i.d. standard complex Gaussians.
PureState haar_pure(const HilbertSpec& space, std::uint64_t seed);
PureState haar_pure(const HilbertSpec& space, std::mt19937_64& rng);

/// Haar-random unitary via QR of a complex Ginibre matrix with phase correction.
Matrix haar_unitary(int dim, std::mt19937_64& rng);

}  // namespace qbc
