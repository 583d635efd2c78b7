#include "qbc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbc/error.hpp"

namespace qbc {

HermitianEigen eigh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigendecomposition failed", 0.0);
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigvalsh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigendecomposition failed", 0.0);
  }
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& hermitian) { return eigvalsh(hermitian).minCoeff(); }

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

namespace {

Matrix spectral_map(const HermitianEigen& eig, double (*f)(double)) {
  RealVector mapped = eig.values.unaryExpr(f);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

double clamp_nonneg(double x) { return x > 0.0 ? x : 0.0; }
double clamped_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

}  // namespace

Matrix psd_projection(const Matrix& hermitian) {
  if (hermitian.size() == 0) return hermitian;
  return spectral_map(eigh(hermitian), clamp_nonneg);
}

Matrix psd_sqrt(const Matrix& hermitian) { return spectral_map(eigh(hermitian), clamped_sqrt); }

double trace_norm(const Matrix& hermitian) { return eigvalsh(hermitian).cwiseAbs().sum(); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double fidelity_raw(const Matrix& rho, const Matrix& sigma) {
  // Work on the support of rho. Eigenvalues at rounding level are zeros whose
  // square roots (~1e-8) would otherwise swamp the result for pure states.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon();
  const HermitianEigen eig = eigh(rho);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > floor) support.push_back(i);
  }
  if (support.empty()) return 0.0;
  Matrix root(rho.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    root.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(support[c]) * std::sqrt(eig.values(support[c]));
  }
  const RealVector inner = eigvalsh(hermitian_part(root.adjoint() * sigma * root));
  double f = 0.0;
  for (double v : inner) f += v > floor ? std::sqrt(v) : 0.0;
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance_raw(const Matrix& rho, const Matrix& sigma) {
  return std::clamp(0.5 * trace_norm(hermitian_part(rho - sigma)), 0.0, 1.0);
}

TensorLayout::TensorLayout(std::vector<int> dims) : dims_(std::move(dims)), strides_(dims_.size()) {
  if (dims_.empty()) throw DimensionError("tensor layout needs at least one subsystem");
  for (std::size_t s = dims_.size(); s-- > 0;) {
    if (dims_[s] < 1) throw DimensionError("subsystem dimensions must be positive");
    strides_[s] = total_;
    total_ *= dims_[s];
  }
}

std::vector<int> TensorLayout::digits(int index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    out[s] = (index / strides_[s]) % dims_[s];
  }
  return out;
}

int TensorLayout::compose(std::span<const int> digits) const {
  int index = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) index += digits[s] * strides_[s];
  return index;
}

namespace {

// For every basis index of the full space: its index within the kept factors
// and its index within the complementary factors.
struct SplitIndex {
  std::vector<int> kept;
  std::vector<int> rest;
  int kept_dim = 1;
  int rest_dim = 1;
};

SplitIndex split(const TensorLayout& layout, std::span<const int> keep) {
  const auto n = static_cast<int>(layout.subsystems());
  std::vector<bool> is_kept(n, false);
  int previous = -1;
  for (int s : keep) {
    if (s < 0 || s >= n) throw DimensionError("subsystem index out of range");
    if (s <= previous) throw DimensionError("subsystem indices must be strictly ascending");
    is_kept[s] = true;
    previous = s;
  }
  SplitIndex out;
  out.kept.resize(layout.total());
  out.rest.resize(layout.total());
  for (int s = 0; s < n; ++s) (is_kept[s] ? out.kept_dim : out.rest_dim) *= layout.dims()[s];
  for (int i = 0; i < layout.total(); ++i) {
    const auto d = layout.digits(i);
    int k = 0, r = 0;
    for (int s = 0; s < n; ++s) {
      if (is_kept[s]) {
        k = k * layout.dims()[s] + d[s];
      } else {
        r = r * layout.dims()[s] + d[s];
      }
    }
    out.kept[i] = k;
    out.rest[i] = r;
  }
  return out;
}

void check_square(const Matrix& m, const TensorLayout& layout) {
  if (m.rows() != layout.total() || m.cols() != layout.total()) {
    throw DimensionError("matrix size does not match tensor layout");
  }
}

}  // namespace

Matrix partial_trace(const Matrix& m, const TensorLayout& layout, std::span<const int> keep) {
  check_square(m, layout);
  if (keep.empty()) throw DimensionError("partial trace must keep at least one subsystem");
  const SplitIndex ix = split(layout, keep);
  Matrix out = Matrix::Zero(ix.kept_dim, ix.kept_dim);
  const int n = layout.total();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (ix.rest[i] == ix.rest[j]) out(ix.kept[i], ix.kept[j]) += m(i, j);
    }
  }
  return out;
}

Matrix partial_transpose(const Matrix& m, const TensorLayout& layout, int subsystem) {
  check_square(m, layout);
  if (subsystem < 0 || subsystem >= static_cast<int>(layout.subsystems())) {
    throw DimensionError("subsystem index out of range");
  }
  const int n = layout.total();
  Matrix out(n, n);
  std::vector<std::vector<int>> digits(n);
  for (int i = 0; i < n; ++i) digits[i] = layout.digits(i);
  std::vector<int> row, col;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      row = digits[i];
      col = digits[j];
      std::swap(row[subsystem], col[subsystem]);
      out(layout.compose(row), layout.compose(col)) = m(i, j);
    }
  }
  return out;
}

Matrix embed(const Matrix& local, const TensorLayout& layout, std::span<const int> positions) {
  const SplitIndex ix = split(layout, positions);
  if (local.rows() != ix.kept_dim || local.cols() != ix.kept_dim) {
    throw DimensionError("local operator does not match the embedded subsystems");
  }
  const int n = layout.total();
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (ix.rest[i] == ix.rest[j]) out(i, j) = local(ix.kept[i], ix.kept[j]);
    }
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace qbc
