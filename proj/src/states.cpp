#include "qbc/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qbc/error.hpp"

namespace qbc {

HilbertSpec::HilbertSpec(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("Hilbert space needs at least one subsystem");
  for (int d : dims_) {
    if (d < 1) throw DimensionError("subsystem dimension must be >= 1, got " + std::to_string(d));
  }
  if (total() < 2) throw DimensionError("total Hilbert space dimension must be >= 2");
}

int HilbertSpec::total() const noexcept {
  return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<>());
}

DensityMatrix::DensityMatrix(HilbertSpec space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const int n = space_.total();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionError("density matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + ", space has dimension " +
                         std::to_string(n));
  }
  if (!all_finite(matrix_)) throw InvariantError("density matrix contains NaN or infinity");
  const double asym = max_abs(matrix_ - matrix_.adjoint());
  if (asym > kHermitianTol) {
    throw InvariantError("density matrix not Hermitian: max |M - M^dag| = " + std::to_string(asym));
  }
  matrix_ = hermitian_part(matrix_);
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvariantError("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lmin = min_eigenvalue(matrix_);
  if (lmin < -kPsdTol) {
    throw InvariantError("density matrix not PSD: minimum eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(HilbertSpec space) {
  const int n = space.total();
  return DensityMatrix(std::move(space), Matrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::basis_state(HilbertSpec space, int index) {
  const int n = space.total();
  if (index < 0 || index >= n) throw DimensionError("basis index out of range");
  Matrix m = Matrix::Zero(n, n);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(space), std::move(m));
}

PureState::PureState(HilbertSpec space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total()) throw DimensionError("amplitude vector size mismatch");
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTol) {
    throw InvariantError("pure state norm is " + std::to_string(norm) + ", expected 1");
  }
}

PureState PureState::bloch(double theta, double phi) {
  Vector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return PureState(HilbertSpec::qubit(), v);
}

DensityMatrix PureState::density() const {
  return DensityMatrix(space_, amplitudes_ * amplitudes_.adjoint());
}

namespace {

void require_same_space(const HilbertSpec& a, const HilbertSpec& b) {
  if (!(a == b)) throw DimensionError("states live on different Hilbert spaces");
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_space(rho.space(), sigma.space());
  return fidelity_raw(rho.matrix(), sigma.matrix());
}

double fidelity(const PureState& psi, const DensityMatrix& sigma) {
  require_same_space(psi.space(), sigma.space());
  const double overlap = psi.amplitudes().dot(sigma.matrix() * psi.amplitudes()).real();
  return std::clamp(std::sqrt(std::max(overlap, 0.0)), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_space(rho.space(), sigma.space());
  return trace_distance_raw(rho.matrix(), sigma.matrix());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DimensionError("duplicate subsystem index in partial trace");
  }
  Matrix reduced = partial_trace(rho.matrix(), rho.space().layout(), keep);
  std::vector<int> dims;
  for (int s : keep) dims.push_back(rho.space().dims()[s]);
  return DensityMatrix(HilbertSpec(std::move(dims)), hermitian_part(reduced));
}

Matrix partial_transpose(const DensityMatrix& rho, int subsystem) {
  return partial_transpose(rho.matrix(), rho.space().layout(), subsystem);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.space().dims();
  dims.insert(dims.end(), b.space().dims().begin(), b.space().dims().end());
  return DensityMatrix(HilbertSpec(std::move(dims)), kron(a.matrix(), b.matrix()));
}

PureState haar_pure(const HilbertSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(space.total());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  v /= v.norm();
  return PureState(space, std::move(v));
}

PureState haar_pure(const HilbertSpec& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_pure(space, rng);
}

Matrix haar_unitary(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw DimensionError("unitary dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace qbc
