#include "qbc/extendibility.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "qbc/error.hpp"

namespace qbc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::extendible:
      return "extendible";
    case Verdict::not_extendible:
      return "not_extendible";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

namespace {

int int_pow(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Index tables for one (d_A, d_B, k) signature. Immutable once built.
struct ExtensionGeometry {
  int d_a = 0;
  int d_b = 0;
  int k = 0;
  int dim = 0;       // d_A d_B^k
  int pair_dim = 0;  // d_A d_B
  int rest_dim = 0;  // d_B^(k-1)
  // pair_index[i][n], rest_index[i][n]: for basis index n of A B^k, its index in
  // the A B_{i+1} factor and in the complementary B factors.
  std::vector<std::vector<int>> pair_index;
  std::vector<std::vector<int>> rest_index;
  // Orbit of each matrix entry (column-major n = row + col*dim) under
  // simultaneous permutation of the B factors.
  std::vector<int> orbit_of;
  std::vector<double> orbit_inv_size;
  int orbits = 0;
};

std::vector<std::vector<int>> b_permutations(int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::shared_ptr<const ExtensionGeometry> build_geometry(int d_a, int d_b, int k) {
  auto g = std::make_shared<ExtensionGeometry>();
  g->d_a = d_a;
  g->d_b = d_b;
  g->k = k;
  g->rest_dim = int_pow(d_b, k - 1);
  g->pair_dim = d_a * d_b;
  g->dim = g->pair_dim * g->rest_dim;
  std::vector<int> dims(k + 1, d_b);
  dims[0] = d_a;
  const TensorLayout layout(dims);

  std::vector<std::vector<int>> digits(g->dim);
  for (int n = 0; n < g->dim; ++n) digits[n] = layout.digits(n);

  g->pair_index.assign(k, std::vector<int>(g->dim));
  g->rest_index.assign(k, std::vector<int>(g->dim));
  for (int i = 0; i < k; ++i) {
    for (int n = 0; n < g->dim; ++n) {
      const auto& dg = digits[n];
      g->pair_index[i][n] = dg[0] * d_b + dg[1 + i];
      int r = 0;
      for (int s = 1; s <= k; ++s) {
        if (s != 1 + i) r = r * d_b + dg[s];
      }
      g->rest_index[i][n] = r;
    }
  }

  // Orbit representative: smallest permuted (row, col) entry index.
  const auto perms = b_permutations(k);
  std::vector<std::vector<int>> index_maps;
  for (const auto& perm : perms) {
    std::vector<int> map(g->dim);
    std::vector<int> permuted(k + 1);
    for (int n = 0; n < g->dim; ++n) {
      permuted[0] = digits[n][0];
      for (int s = 0; s < k; ++s) permuted[1 + perm[s]] = digits[n][1 + s];
      map[n] = layout.compose(permuted);
    }
    index_maps.push_back(std::move(map));
  }
  const std::size_t entries = static_cast<std::size_t>(g->dim) * g->dim;
  std::vector<long long> rep(entries, -1);
  for (int c = 0; c < g->dim; ++c) {
    for (int r = 0; r < g->dim; ++r) {
      long long best = -1;
      for (const auto& map : index_maps) {
        const long long e = static_cast<long long>(map[r]) + static_cast<long long>(map[c]) * g->dim;
        if (best < 0 || e < best) best = e;
      }
      rep[static_cast<std::size_t>(r) + static_cast<std::size_t>(c) * g->dim] = best;
    }
  }
  std::map<long long, int> ids;
  g->orbit_of.resize(entries);
  std::vector<int> sizes;
  for (std::size_t e = 0; e < entries; ++e) {
    auto [it, inserted] = ids.emplace(rep[e], static_cast<int>(sizes.size()));
    if (inserted) sizes.push_back(0);
    g->orbit_of[e] = it->second;
    ++sizes[it->second];
  }
  g->orbits = static_cast<int>(sizes.size());
  g->orbit_inv_size.resize(sizes.size());
  for (std::size_t o = 0; o < sizes.size(); ++o) g->orbit_inv_size[o] = 1.0 / sizes[o];
  return g;
}

std::shared_ptr<const ExtensionGeometry> geometry(int d_a, int d_b, int k) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const ExtensionGeometry>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{d_a, d_b, k}];
  if (!slot) slot = build_geometry(d_a, d_b, k);
  return slot;
}

Matrix pair_marginal(const ExtensionGeometry& g, const Matrix& x, int i) {
  const auto& pi = g.pair_index[i];
  const auto& ri = g.rest_index[i];
  Matrix out = Matrix::Zero(g.pair_dim, g.pair_dim);
  for (int c = 0; c < g.dim; ++c) {
    for (int r = 0; r < g.dim; ++r) {
      if (ri[r] == ri[c]) out(pi[r], pi[c]) += x(r, c);
    }
  }
  return out;
}

// local (x) identity on the factors other than A B_{i+1}, added into `x` with a scale.
void add_embedded(const ExtensionGeometry& g, const Matrix& local, int i, double scale, Matrix& x) {
  const auto& pi = g.pair_index[i];
  const auto& ri = g.rest_index[i];
  for (int c = 0; c < g.dim; ++c) {
    for (int r = 0; r < g.dim; ++r) {
      if (ri[r] == ri[c]) x(r, c) += scale * local(pi[r], pi[c]);
    }
  }
}

Matrix twirl(const ExtensionGeometry& g, const Matrix& x) {
  std::vector<Complex> sums(g.orbits, Complex(0.0, 0.0));
  const Complex* data = x.data();
  const std::size_t entries = static_cast<std::size_t>(g.dim) * g.dim;
  for (std::size_t e = 0; e < entries; ++e) sums[g.orbit_of[e]] += data[e];
  Matrix out(g.dim, g.dim);
  Complex* od = out.data();
  for (std::size_t e = 0; e < entries; ++e) {
    const int o = g.orbit_of[e];
    od[e] = sums[o] * g.orbit_inv_size[o];
  }
  return out;
}

// tr_B(m) (x) I_B for an operator on A (x) B.
Matrix lift_b_trace(const Matrix& m, int d_a, int d_b) {
  Matrix out = Matrix::Zero(d_a * d_b, d_a * d_b);
  for (int a = 0; a < d_a; ++a) {
    for (int ap = 0; ap < d_a; ++ap) {
      Complex s(0.0, 0.0);
      for (int b = 0; b < d_b; ++b) s += m(a * d_b + b, ap * d_b + b);
      for (int b = 0; b < d_b; ++b) out(a * d_b + b, ap * d_b + b) = s;
    }
  }
  return out;
}

// Orthogonal (Frobenius) projection onto the affine constraint set.
class AffineProjector {
 public:
  AffineProjector(std::shared_ptr<const ExtensionGeometry> g, Matrix target, bool symmetric)
      : g_(std::move(g)), target_(std::move(target)), symmetric_(symmetric) {}

  Matrix operator()(const Matrix& x) const { return symmetric_ ? symmetric(x) : plain(x); }

 private:
  // Project onto permutation-invariant operators, then within that subspace
  // onto {tr_{B_2..B_k} Y = chi}. With A the partial trace and T the twirl,
  // the correction is T A^*(A T A^*)^{-1}(A Y - chi), and
  //   A T A^*(D) = d_B^{k-2}/k (d_B D + (k-1) tr_B(D) (x) I_B),
  // which has the closed-form inverse used below.
  Matrix symmetric(const Matrix& x) const {
    const ExtensionGeometry& g = *g_;
    Matrix y = twirl(g, x);
    const Matrix residual = pair_marginal(g, y, 0) - target_;
    const double m = g.d_b;
    const double c = g.k - 1;
    const Matrix delta = (residual - (c / (m + c * m)) * lift_b_trace(residual, g.d_a, g.d_b)) / m *
                         (g.k / std::pow(m, g.k - 2));
    Matrix correction = Matrix::Zero(g.dim, g.dim);
    add_embedded(g, delta, 0, 1.0, correction);
    y -= twirl(g, correction);
    return y;
  }

  // Constraints A_i(X) = chi for every i. Splitting each residual into its
  // tr_B-free part and its tr_B(.) (x) I/d_B part diagonalizes A A^*:
  // it scales the first by d_B^{k-1} and acts as d_B^{k-1} J (all-ones over i)
  // on the second, whose pseudo-inverse is J / k^2.
  Matrix plain(const Matrix& x) const {
    const ExtensionGeometry& g = *g_;
    const double scale = std::pow(static_cast<double>(g.d_b), g.k - 1);
    std::vector<Matrix> free_part(g.k);
    Matrix lifted_sum = Matrix::Zero(g.pair_dim, g.pair_dim);
    for (int i = 0; i < g.k; ++i) {
      const Matrix residual = pair_marginal(g, x, i) - target_;
      const Matrix lifted = lift_b_trace(residual, g.d_a, g.d_b) / static_cast<double>(g.d_b);
      free_part[i] = residual - lifted;
      lifted_sum += lifted;
    }
    const Matrix shared = lifted_sum / (static_cast<double>(g.k) * g.k * scale);
    Matrix y = x;
    for (int i = 0; i < g.k; ++i) add_embedded(g, free_part[i] / scale + shared, i, -1.0, y);
    return y;
  }

  std::shared_ptr<const ExtensionGeometry> g_;
  Matrix target_;
  bool symmetric_;
};

// Frobenius projection onto {V Z V^dag : Z PSD}.
class FaceProjector {
 public:
  FaceProjector(Matrix basis, int dim) : basis_(std::move(basis)), dim_(dim) {}

  int face_dim() const noexcept { return static_cast<int>(basis_.cols()); }

  /// Projection onto {X >= shift * I}; only used without facial reduction.
  Matrix shifted(const Matrix& x, double shift) const {
    const Matrix id = Matrix::Identity(dim_, dim_);
    return psd_projection(hermitian_part(x) - shift * id) + shift * id;
  }

  static FaceProjector whole_space(int dim) {
    FaceProjector f(Matrix::Identity(dim, dim), dim);
    f.is_identity_ = true;
    return f;
  }

  bool whole_space_face() const noexcept { return is_identity_; }

  Matrix operator()(const Matrix& x) const {
    if (is_identity_) return psd_projection(hermitian_part(x));
    if (basis_.cols() == 0) return Matrix::Zero(dim_, dim_);
    const Matrix z = hermitian_part(basis_.adjoint() * x * basis_);
    return basis_ * psd_projection(z) * basis_.adjoint();
  }

 private:
  Matrix basis_;
  int dim_;
  bool is_identity_ = false;
};

constexpr int kDenseFallbackDim = 16;

FaceProjector build_face(const ExtensionGeometry& g, const Matrix& target, double kernel_tol) {
  const HermitianEigen eig = eigh(target);
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index e = 0; e < eig.values.size(); ++e) {
    if (eig.values(e) < kernel_tol) kernel.push_back(e);
  }
  if (kernel.empty()) return FaceProjector::whole_space(g.dim);
  Matrix kproj = Matrix::Zero(g.pair_dim, g.pair_dim);
  for (Eigen::Index e : kernel) kproj += eig.vectors.col(e) * eig.vectors.col(e).adjoint();
  Matrix penalty = Matrix::Zero(g.dim, g.dim);
  for (int i = 0; i < g.k; ++i) add_embedded(g, kproj, i, 1.0, penalty);
  const HermitianEigen face = eigh(hermitian_part(penalty));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index e = 0; e < face.values.size(); ++e) {
    if (face.values(e) < 1e-8) keep.push_back(e);
  }
  Matrix basis(g.dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = face.vectors.col(keep[c]);
  return FaceProjector(std::move(basis), g.dim);
}

// Small dense fallback: maximize t subject to X - tI >= 0 over the affine set
// with a log-barrier Newton method. Stops as soon as X is positive definite
// and returns the best X found.
Matrix interior_point(const AffineProjector& affine, int n) {
  using Real = Eigen::MatrixXd;
  const Matrix x0 = affine(Matrix::Zero(n, n));
  const Eigen::Index entries = static_cast<Eigen::Index>(n) * n;
  Real images(2 * entries, entries);
  Eigen::Index col = 0;
  auto add_image = [&](const Matrix& e) {
    const Matrix img = affine(e) - x0;
    images.col(col).head(entries) = Eigen::Map<const Eigen::VectorXcd>(img.data(), entries).real();
    images.col(col).tail(entries) = Eigen::Map<const Eigen::VectorXcd>(img.data(), entries).imag();
    ++col;
  };
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
        add_image(e);
        continue;
      }
      e(i, j) = e(j, i) = r;
      add_image(e);
      e(i, j) = Complex(0.0, -r);
      e(j, i) = Complex(0.0, r);
      add_image(e);
    }
  }
  // The linear part of a Euclidean projection is an orthogonal projector, so
  // its singular values are 0 or 1.
  const Eigen::BDCSVD<Real> svd(images, Eigen::ComputeThinU);
  std::vector<Matrix> dirs;
  for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c) {
    if (svd.singularValues()(c) < 0.5) continue;
    Matrix b(n, n);
    for (Eigen::Index e = 0; e < entries; ++e) b.data()[e] = Complex(svd.matrixU()(e, c), svd.matrixU()(entries + e, c));
    dirs.push_back(hermitian_part(b));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(dirs.size());
  const Matrix id = Matrix::Identity(n, n);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  auto point = [&](const Eigen::VectorXd& w) {
    Matrix x = x0;
    for (Eigen::Index i = 0; i < m; ++i) x += w(i) * dirs[static_cast<std::size_t>(i)];
    return x;
  };
  double t = min_eigenvalue(x0) - 1e-2;
  auto barrier = [&](const Eigen::VectorXd& w, double tt, double mu, double& value) {
    Eigen::LLT<Matrix> llt(point(w) - tt * id);
    if (llt.info() != Eigen::Success) return false;
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    if (!std::isfinite(logdet)) return false;
    value = -tt - mu * logdet;
    return true;
  };

  for (double mu = 1e-3; mu > 1e-15; mu *= 0.1) {
    for (int newton = 0; newton < 60; ++newton) {
      const Matrix finv = (point(z) - t * id).inverse();
      std::vector<Matrix> g(static_cast<std::size_t>(m + 1));
      Eigen::VectorXd grad(m + 1);
      for (Eigen::Index i = 0; i < m; ++i) {
        g[static_cast<std::size_t>(i)] = finv * dirs[static_cast<std::size_t>(i)];
        grad(i) = -mu * g[static_cast<std::size_t>(i)].trace().real();
      }
      g[static_cast<std::size_t>(m)] = -finv;
      grad(m) = -1.0 - mu * g[static_cast<std::size_t>(m)].trace().real();
      Real hess(m + 1, m + 1);
      for (Eigen::Index i = 0; i <= m; ++i) {
        for (Eigen::Index j = i; j <= m; ++j) {
          const double h = mu * g[static_cast<std::size_t>(i)].cwiseProduct(g[static_cast<std::size_t>(j)].transpose()).sum().real();
          hess(i, j) = hess(j, i) = h;
        }
      }
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!step.allFinite() || decrement < 1e-14 * mu) break;
      double f0 = 0.0;
      barrier(z, t, mu, f0);
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        double f1 = 0.0;
        const Eigen::VectorXd zn = z + alpha * step.head(m);
        const double tn = t + alpha * step(m);
        if (barrier(zn, tn, mu, f1) && f1 <= f0 - 0.25 * alpha * decrement) {
          z = zn;
          t = tn;
          break;
        }
      }
      if (t > 0.0) return point(z);
    }
  }
  return point(z);
}

// Rescales the A factor so that tr_{B...} X = I/d_A exactly; keeps PSD and B symmetry.
Matrix normalize_a_marginal(const Matrix& x, int d_a, int rest) {
  const TensorLayout layout({d_a, rest});
  const std::vector<int> keep{0};
  const Matrix s = hermitian_part(partial_trace(x, layout, keep)) * static_cast<double>(d_a);
  const HermitianEigen eig = eigh(s);
  const RealVector inv_sqrt = eig.values.unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
  const Matrix s_inv_sqrt = eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.adjoint();
  const Matrix lift = kron(s_inv_sqrt, Matrix::Identity(rest, rest));
  return hermitian_part(lift * x * lift.adjoint());
}

double max_marginal_error(const ExtensionGeometry& g, const Matrix& x, const Matrix& target) {
  double err = 0.0;
  for (int i = 0; i < g.k; ++i) err = std::max(err, max_abs(pair_marginal(g, x, i) - target));
  return err;
}

}  // namespace

ExtendibilityCertificate test_k_extendible(const ExtensionProblem& problem, const ExtensionConfig& config) {
  const int d_a = problem.target.input_dim();
  const int d_b = problem.target.output_dim();
  const int k = problem.k;
  if (k < 1) throw DomainError("extension order k must be >= 1");
  const double total = static_cast<double>(d_a) * std::pow(static_cast<double>(d_b), k);
  if (total > config.dimension_cap) {
    throw DimensionError("extension dimension " + std::to_string(static_cast<long long>(total)) +
                         " exceeds cap " + std::to_string(config.dimension_cap));
  }
  const auto g = geometry(d_a, d_b, k);
  const Matrix& target = problem.target.matrix();
  const AffineProjector affine(g, target, problem.symmetrize);
  const FaceProjector cone = build_face(*g, target, config.kernel_tol);

  std::vector<int> dims(k + 1, d_b);
  dims[0] = d_a;
  const HilbertSpec space(dims);

  ExtendibilityCertificate cert;
  auto accept = [&](Matrix candidate) {
    if (problem.symmetrize) candidate = twirl(*g, candidate);
    const double tr = candidate.trace().real();
    if (tr <= 0.0) return false;
    candidate = normalize_a_marginal(candidate / tr, d_a, g->dim / d_a);
    const double err = max_marginal_error(*g, candidate, target);
    if (err > config.marginal_tol || min_eigenvalue(candidate) < -kPsdTol) return false;
    cert.verdict = Verdict::extendible;
    cert.marginal_error = err;
    cert.extension.emplace(space, std::move(candidate));
    return true;
  };

  // One Dykstra run from the minimum-norm start. With shift > 0 the cone is
  // {X >= shift * I}: once the residual is below the shift, the affine iterate
  // is itself PSD and satisfies every constraint, so it certifies directly.
  // A stall only proves infeasibility for the unshifted cone.
  auto run = [&](double shift, int budget) -> std::optional<Verdict> {
    Matrix start = Matrix::Zero(g->dim, g->dim);
    add_embedded(*g, target, 0, 1.0 / g->rest_dim, start);
    Matrix x = shift > 0.0 ? cone.shifted(start, shift) : cone(start);
    Matrix p = Matrix::Zero(g->dim, g->dim);
    Matrix q = Matrix::Zero(g->dim, g->dim);
    std::deque<double> history;
    for (int it = 1; it <= budget; ++it) {
      const Matrix y = affine(x + p);
      p = x + p - y;
      Matrix x_next = shift > 0.0 ? cone.shifted(y + q, shift) : cone(y + q);
      q = y + q - x_next;
      x = std::move(x_next);
      const double residual = (x - y).norm();
      cert.residual = residual;
      ++cert.iterations;

      if (residual < config.feasibility_tol && accept(cone(y))) return Verdict::extendible;
      if (shift > 0.0 && residual < 0.5 * shift && accept(y)) return Verdict::extendible;

      history.push_back(residual);
      if (static_cast<int>(history.size()) > config.stall_window) {
        const double old = history.front();
        history.pop_front();
        if (std::abs(residual - old) <= config.stall_relative_change * residual) {
          if (shift > 0.0) return std::nullopt;
          if (residual >= config.infeasibility_gap) return Verdict::not_extendible;
        }
      }
    }
    return std::nullopt;
  };

  // Interior attempts for full-rank targets, whose nearest extension can sit
  // on the PSD boundary where the plain iteration converges sublinearly. Any
  // extension has lambda_min <= lambda_min(target) / rest_dim.
  if (cone.whole_space_face()) {
    const double ceiling = min_eigenvalue(target) / g->rest_dim;
    for (double fraction : {0.25, 1.0 / 64.0}) {
      const int budget = config.max_iterations / 8;
      if (run(fraction * ceiling, budget) == Verdict::extendible) return cert;
    }
  }
  const int remaining = std::max(0, config.max_iterations - cert.iterations);
  cert.verdict = run(0.0, remaining).value_or(Verdict::inconclusive);
  if (cert.verdict == Verdict::inconclusive && g->dim <= kDenseFallbackDim) {
    if (accept(interior_point(affine, g->dim))) cert.residual = 0.0;
  }
  return cert;
}

PptResult is_ppt(const DensityMatrix& rho) {
  if (rho.space().subsystems() != 2) throw DimensionError("PPT test needs a bipartite state");
  const double lmin = min_eigenvalue(hermitian_part(partial_transpose(rho, 1)));
  return {lmin >= -kPsdTol, lmin};
}

std::string EntanglementBreakingResult::describe() const {
  if (exact) return entanglement_breaking ? "entanglement-breaking" : "not entanglement-breaking";
  return entanglement_breaking ? "PPT only (necessary condition for entanglement-breaking)"
                               : "not entanglement-breaking (NPT Choi state)";
}

EntanglementBreakingResult is_entanglement_breaking(const KrausChannel& channel) {
  const ChoiState choi = kraus_to_choi(channel);
  const PptResult ppt = is_ppt(choi.state());
  // PPT is equivalent to separability for 2x2 and 2x3 (Horodecki).
  const int product = channel.input_dim() * channel.output_dim();
  const bool exact = product <= 6 || !ppt.ppt;
  return {ppt.ppt, exact, ppt.min_eigenvalue};
}

BroadcastChannel::BroadcastChannel(DensityMatrix extension, int input_dim, int output_dim, int parties)
    : extension_(std::move(extension)), input_dim_(input_dim), output_dim_(output_dim), parties_(parties) {}

BroadcastChannel broadcasting_channel_from_extension(const DensityMatrix& extension) {
  const auto& dims = extension.space().dims();
  if (dims.size() < 2) throw DimensionError("extension needs an A factor and at least one B factor");
  const int d_a = dims[0];
  const int d_b = dims[1];
  for (std::size_t s = 2; s < dims.size(); ++s) {
    if (dims[s] != d_b) throw DimensionError("all B factors of an extension must share one dimension");
  }
  const int parties = static_cast<int>(dims.size()) - 1;
  const std::vector<int> keep{0};
  const Matrix marginal = partial_trace(extension.matrix(), extension.space().layout(), keep);
  const double deficit = max_abs(marginal - Matrix::Identity(d_a, d_a) / static_cast<double>(d_a));
  if (deficit > kBroadcastMarginalTol) {
    throw NotTracePreservingError(
        "extension's A marginal is not maximally mixed (deficit " + std::to_string(deficit) +
            "); the induced map would not preserve trace",
        deficit);
  }
  return BroadcastChannel(extension, d_a, d_b, parties);
}

DensityMatrix BroadcastChannel::apply(const DensityMatrix& rho) const {
  if (rho.dim() != input_dim_) throw DimensionError("state dimension does not match broadcast input");
  const int out_dim = int_pow(output_dim_, parties_);
  Matrix out = apply_via_choi_raw(extension_.matrix(), input_dim_, out_dim, rho.matrix());
  out = hermitian_part(out);
  // Trace is 1 up to the tolerated A-marginal deficit.
  out /= out.trace().real();
  return DensityMatrix(HilbertSpec(std::vector<int>(parties_, output_dim_)), std::move(out));
}

DensityMatrix BroadcastChannel::output_marginal(const DensityMatrix& rho, int party) const {
  if (party < 1 || party > parties_) throw DimensionError("party index out of range");
  if (parties_ == 1) return apply(rho);
  return partial_trace(apply(rho), std::vector<int>{party - 1});
}

double BroadcastChannel::marginal_disparity(const DensityMatrix& rho) const {
  const DensityMatrix joint = apply(rho);
  std::vector<DensityMatrix> marginals;
  for (int i = 0; i < parties_; ++i) {
    marginals.push_back(parties_ == 1 ? joint : partial_trace(joint, std::vector<int>{i}));
  }
  double worst = 0.0;
  for (int i = 0; i < parties_; ++i) {
    for (int j = i + 1; j < parties_; ++j) worst = std::max(worst, trace_distance(marginals[i], marginals[j]));
  }
  return worst;
}

KrausChannel local_map(const BroadcastChannel& channel, int party) {
  if (party < 1 || party > channel.parties()) throw DimensionError("party index out of range");
  const DensityMatrix pair = partial_trace(channel.extension(), std::vector<int>{0, party});
  // Absorb the tolerated A-marginal deficit so the result is exactly trace preserving.
  Matrix choi = normalize_a_marginal(pair.matrix(), channel.input_dim(), channel.output_dim());
  return choi_to_kraus(ChoiState(std::move(choi), channel.input_dim(), channel.output_dim()));
}

std::string HierarchyLevel::describe() const {
  if (infinite) return "infinite (entanglement-breaking)";
  if (is_private()) return "1 (private)";
  if (capped) {
    if (k_lo == k_hi) return ">= " + std::to_string(k_lo);
    return ">= " + std::to_string(k_lo) + " (inconclusive up to " + std::to_string(k_hi) + ")";
  }
  if (k_lo == k_hi) return std::to_string(k_lo);
  return "[" + std::to_string(k_lo) + ", " + std::to_string(k_hi) + "]";
}

HierarchyLevel max_broadcast_number(const KrausChannel& channel, int k_max, const ExtensionConfig& config) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  HierarchyLevel level;
  const EntanglementBreakingResult eb = is_entanglement_breaking(channel);
  if (eb.entanglement_breaking && eb.exact) {
    level.infinite = true;
    level.k_lo = level.k_hi = k_max;
    return level;
  }
  const ChoiState choi = kraus_to_choi(channel);
  level.k_lo = 1;
  level.k_hi = k_max;
  level.capped = true;
  for (int k = 2; k <= k_max; ++k) {
    const ExtendibilityCertificate cert = test_k_extendible({choi, k, true}, config);
    if (cert.verdict == Verdict::extendible) {
      level.k_lo = k;
    } else if (cert.verdict == Verdict::not_extendible) {
      level.k_hi = k - 1;
      level.capped = false;
      break;
    }
  }
  return level;
}

}  // namespace qbc
