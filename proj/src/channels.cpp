#include "qbc/channels.hpp"

#include <cmath>
#include <string>

#include "qbc/error.hpp"

namespace qbc {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

KrausChannel::KrausChannel(std::vector<Matrix> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) throw InvariantError("channel needs at least one Kraus operator");
  output_dim_ = static_cast<int>(operators_.front().rows());
  input_dim_ = static_cast<int>(operators_.front().cols());
  if (input_dim_ < 2 || output_dim_ < 2) throw DimensionError("channel dimensions must be >= 2");
  Matrix completeness = Matrix::Zero(input_dim_, input_dim_);
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const Matrix& k = operators_[i];
    if (k.rows() != output_dim_ || k.cols() != input_dim_) {
      throw DimensionError("Kraus operator " + std::to_string(i) + " has inconsistent shape");
    }
    if (!all_finite(k)) throw InvariantError("Kraus operator " + std::to_string(i) + " is not finite");
    completeness += k.adjoint() * k;
  }
  const double err = max_abs(completeness - Matrix::Identity(input_dim_, input_dim_));
  if (err > kCompletenessTol) {
    throw InvariantError("Kraus completeness violated: max |sum K^dag K - I| = " + std::to_string(err));
  }
}

Matrix KrausChannel::apply_raw(const Matrix& rho) const {
  if (rho.rows() != input_dim_ || rho.cols() != input_dim_) {
    throw DimensionError("state dimension does not match channel input");
  }
  Matrix out = Matrix::Zero(output_dim_, output_dim_);
  for (const Matrix& k : operators_) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix KrausChannel::apply_pure(const Vector& psi) const {
  if (psi.size() != input_dim_) throw DimensionError("state dimension does not match channel input");
  Matrix out = Matrix::Zero(output_dim_, output_dim_);
  for (const Matrix& k : operators_) {
    const Vector v = k * psi;
    out.noalias() += v * v.adjoint();
  }
  return out;
}

DensityMatrix KrausChannel::apply(const DensityMatrix& rho) const {
  if (rho.dim() != input_dim_) throw DimensionError("state dimension does not match channel input");
  return DensityMatrix(HilbertSpec({output_dim_}), hermitian_part(apply_raw(rho.matrix())));
}

ChoiState::ChoiState(DensityMatrix choi) : state_(std::move(choi)) {
  if (state_.space().subsystems() != 2) throw DimensionError("Choi state must be bipartite");
  const int d_a = input_dim();
  const std::vector<int> keep_a{0};
  const Matrix marginal = partial_trace(state_.matrix(), state_.space().layout(), keep_a);
  const double err = max_abs(marginal - Matrix::Identity(d_a, d_a) / static_cast<double>(d_a));
  if (err > kChoiMarginalTol) {
    throw InvariantError("Choi state is not trace preserving: max |tr_B chi - I/d_A| = " +
                         std::to_string(err));
  }
}

ChoiState::ChoiState(Matrix choi, int input_dim, int output_dim)
    : ChoiState(DensityMatrix(HilbertSpec({input_dim, output_dim}), std::move(choi))) {}

ChoiState kraus_to_choi(const KrausChannel& channel) {
  const int d_in = channel.input_dim();
  const int d_out = channel.output_dim();
  const int n = d_in * d_out;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
  Matrix chi = Matrix::Zero(n, n);
  Vector v(n);
  for (const Matrix& k : channel.operators()) {
    for (int j = 0; j < d_in; ++j) {
      for (int b = 0; b < d_out; ++b) v(j * d_out + b) = k(b, j) * scale;
    }
    chi.noalias() += v * v.adjoint();
  }
  return ChoiState(hermitian_part(chi), d_in, d_out);
}

KrausChannel choi_to_kraus(const ChoiState& choi) {
  const int d_in = choi.input_dim();
  const int d_out = choi.output_dim();
  const HermitianEigen eig = eigh(choi.matrix());
  if (eig.values.minCoeff() < -kPsdTol) {
    throw InvariantError("Choi matrix is not PSD: minimum eigenvalue " +
                         std::to_string(eig.values.minCoeff()));
  }
  std::vector<Matrix> ops;
  // Largest eigenvalues first so the dominant operator leads.
  for (Eigen::Index e = eig.values.size(); e-- > 0;) {
    const double lambda = eig.values(e);
    if (lambda < kKrausDropTol) continue;
    const double scale = std::sqrt(lambda * d_in);
    Matrix k(d_out, d_in);
    for (int j = 0; j < d_in; ++j) {
      for (int b = 0; b < d_out; ++b) k(b, j) = scale * eig.vectors(j * d_out + b, e);
    }
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

Matrix apply_via_choi_raw(const Matrix& choi, int input_dim, int output_dim, const Matrix& rho) {
  Matrix out = Matrix::Zero(output_dim, output_dim);
  for (int j = 0; j < input_dim; ++j) {
    for (int jp = 0; jp < input_dim; ++jp) {
      out += rho(j, jp) * choi.block(j * output_dim, jp * output_dim, output_dim, output_dim);
    }
  }
  return out * static_cast<double>(input_dim);
}

DensityMatrix apply_via_choi(const ChoiState& choi, const DensityMatrix& rho) {
  if (rho.dim() != choi.input_dim()) throw DimensionError("state dimension does not match Choi input");
  const Matrix out = apply_via_choi_raw(choi.matrix(), choi.input_dim(), choi.output_dim(), rho.matrix());
  return DensityMatrix(HilbertSpec({choi.output_dim()}), hermitian_part(out));
}

StinespringDilation::StinespringDilation(Matrix unitary, int system_dim, int ancilla_dim)
    : unitary_(std::move(unitary)), system_dim_(system_dim), ancilla_dim_(ancilla_dim) {
  const int n = system_dim_ * ancilla_dim_;
  if (system_dim_ < 2 || ancilla_dim_ < 1 || unitary_.rows() != n || unitary_.cols() != n) {
    throw DimensionError("dilation unitary does not match system and ancilla dimensions");
  }
  const double err = max_abs(unitary_ * unitary_.adjoint() - Matrix::Identity(n, n));
  if (err > kCompletenessTol) {
    throw InvariantError("dilation is not unitary: max |U U^dag - I| = " + std::to_string(err));
  }
}

DensityMatrix StinespringDilation::apply(const DensityMatrix& rho) const {
  if (rho.dim() != system_dim_) throw DimensionError("state dimension does not match dilation");
  Matrix ancilla = Matrix::Zero(ancilla_dim_, ancilla_dim_);
  ancilla(0, 0) = 1.0;
  const Matrix joint = unitary_ * kron(rho.matrix(), ancilla) * unitary_.adjoint();
  const TensorLayout layout({system_dim_, ancilla_dim_});
  const std::vector<int> keep{0};
  return DensityMatrix(HilbertSpec({system_dim_}), hermitian_part(partial_trace(joint, layout, keep)));
}

KrausChannel StinespringDilation::reconstruct() const {
  std::vector<Matrix> ops;
  for (int i = 0; i < ancilla_dim_; ++i) {
    Matrix k(system_dim_, system_dim_);
    for (int b = 0; b < system_dim_; ++b) {
      for (int j = 0; j < system_dim_; ++j) k(b, j) = unitary_(b * ancilla_dim_ + i, j * ancilla_dim_);
    }
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

StinespringDilation stinespring(const KrausChannel& channel) {
  const int d = channel.input_dim();
  if (channel.output_dim() != d) throw DimensionError("Stinespring dilation needs d_in == d_out");
  const int n_anc = static_cast<int>(channel.operators().size());
  const int n = d * n_anc;
  Matrix u = Matrix::Zero(n, n);
  std::vector<bool> filled(n, false);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n_anc; ++i) {
      for (int b = 0; b < d; ++b) u(b * n_anc + i, j * n_anc) = channel.operators()[i](b, j);
    }
    filled[j * n_anc] = true;
  }
  // Complete the isometry's columns with standard basis vectors, lexicographic pivot order.
  int next_col = 0;
  for (int e = 0; e < n; ++e) {
    while (next_col < n && filled[next_col]) ++next_col;
    if (next_col == n) break;
    Vector v = Vector::Zero(n);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < n; ++c) {
        if (filled[c]) v -= u.col(c) * u.col(c).dot(v);
      }
    }
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    u.col(next_col) = v / norm;
    filled[next_col] = true;
  }
  return StinespringDilation(std::move(u), d, n_anc);
}

KrausChannel mix(const KrausChannel& a, const KrausChannel& b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw DomainError("mixing weight must lie in [0,1], got " + std::to_string(weight));
  }
  if (a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim()) {
    throw DimensionError("cannot mix channels of different dimensions");
  }
  std::vector<Matrix> ops;
  if (weight < 1.0) {
    const double s = std::sqrt(1.0 - weight);
    for (const Matrix& k : a.operators()) ops.push_back(s * k);
  }
  if (weight > 0.0) {
    const double s = std::sqrt(weight);
    for (const Matrix& k : b.operators()) ops.push_back(s * k);
  }
  return KrausChannel(std::move(ops));
}

double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  return trace_distance(kraus_to_choi(a).state(), kraus_to_choi(b).state());
}

KrausChannel identity_channel(int dim) { return KrausChannel({Matrix::Identity(dim, dim)}); }

KrausChannel unitary_channel(const Matrix& unitary) { return KrausChannel({unitary}); }

namespace {

KrausChannel full_depolarizer(int dim) {
  std::vector<Matrix> ops;
  if (dim == 2) {
    for (const Matrix& p : {Matrix(Matrix::Identity(2, 2)), pauli_x(), pauli_y(), pauli_z()}) {
      ops.push_back(p / 2.0);
    }
  } else {
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        Matrix k = Matrix::Zero(dim, dim);
        k(i, j) = s;
        ops.push_back(std::move(k));
      }
    }
  }
  return KrausChannel(std::move(ops));
}

void require_unit_interval(const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
  }
}

}  // namespace

KrausChannel depolarizing(double r, int dim) {
  require_unit_interval("depolarizing strength r", r);
  return mix(identity_channel(dim), full_depolarizer(dim), r);
}

KrausChannel paper_ep(double p) {
  require_unit_interval("p", p);
  std::vector<Matrix> ops;
  if (p < 1.0) ops.push_back(std::sqrt(1.0 - p) * Matrix::Identity(2, 2));
  if (p > 0.0) {
    ops.push_back(std::sqrt(p / 2.0) * pauli_x());
    ops.push_back(std::sqrt(p / 2.0) * pauli_z());
  }
  return KrausChannel(std::move(ops));
}

KrausChannel paper_eq7(double p, double r) {
  require_unit_interval("r", r);
  return mix(paper_ep(p), depolarizing(1.0), r);
}

KrausChannel amplitude_damping(double gamma) {
  require_unit_interval("gamma", gamma);
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  Matrix k1 = Matrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel({k0, k1});
}

KrausChannel dephasing(double p) {
  require_unit_interval("p", p);
  std::vector<Matrix> ops;
  if (p < 1.0) ops.push_back(std::sqrt(1.0 - p) * Matrix::Identity(2, 2));
  if (p > 0.0) ops.push_back(std::sqrt(p) * pauli_z());
  return KrausChannel(std::move(ops));
}

KrausChannel random_channel(int dim, int kraus_rank, std::mt19937_64& rng) {
  if (kraus_rank < 1) throw DomainError("Kraus rank must be positive");
  const Matrix u = haar_unitary(dim * kraus_rank, rng);
  std::vector<Matrix> ops;
  for (int i = 0; i < kraus_rank; ++i) ops.push_back(u.block(i * dim, 0, dim, dim));
  return KrausChannel(std::move(ops));
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError("missing parameter '" + key + "'");
  return it->second;
}

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int dim_param(const std::map<std::string, double>& params) {
  const double d = param_or(params, "dim", 2.0);
  if (d < 2.0 || d != std::floor(d)) throw DomainError("dim must be an integer >= 2");
  return static_cast<int>(d);
}

}  // namespace

KrausChannel builtin(const std::string& name, const std::map<std::string, double>& params,
                     const Matrix* unitary) {
  if (name == "identity") return identity_channel(dim_param(params));
  if (name == "unitary") {
    if (unitary != nullptr) return unitary_channel(*unitary);
    const double seed = param(params, "seed");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    return unitary_channel(haar_unitary(dim_param(params), rng));
  }
  if (name == "depolarizing") return depolarizing(param(params, "r"), dim_param(params));
  if (name == "paper_ep") return paper_ep(param(params, "p"));
  if (name == "paper_eq7") return paper_eq7(param(params, "p"), param(params, "r"));
  if (name == "amplitude_damping") return amplitude_damping(param(params, "gamma"));
  if (name == "dephasing") return dephasing(param(params, "p"));
  throw DomainError("unknown builtin channel '" + name + "'");
}

}  // namespace qbc
