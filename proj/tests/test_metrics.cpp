#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbc/error.hpp"
#include "qbc/metrics.hpp"

using namespace qbc;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

KrausChannel conjugated(const Matrix& u, const KrausChannel& ch, const Matrix& v) {
  std::vector<Matrix> ops;
  for (const Matrix& k : ch.operators()) ops.push_back(u * k * v);
  return KrausChannel(ops);
}

}  // namespace

TEST_CASE("average fidelity of a channel with itself") {
  std::mt19937_64 rng(1);
  const KrausChannel e = random_channel(2, 3, rng);
  CHECK(std::abs(avg_gate_fidelity(e, e, BlochQuadrature{}).value - 1.0) <= 1e-10);
  CHECK(std::abs(avg_gate_fidelity(e, e, MonteCarlo{2000, 5}).value - 1.0) <= 1e-10);
  CHECK(std::abs(avg_gate_distance(e, e, BlochQuadrature{}).value) <= 1e-10);
  CHECK(std::abs(min_gate_fidelity(e, e).value - 1.0) <= 1e-10);
}

TEST_CASE("identity against the full depolarizer") {
  const KrausChannel id = identity_channel();
  const KrausChannel dep = depolarizing(1.0);
  CHECK(std::abs(avg_gate_fidelity(id, dep, MonteCarlo{100000, kDefaultSeed}).value - kInvSqrt2) <= 0.002);
  CHECK(std::abs(avg_gate_fidelity(id, dep, BlochQuadrature{}).value - kInvSqrt2) <= 1e-12);
  CHECK(std::abs(min_gate_fidelity(id, dep).value - kInvSqrt2) <= 1e-10);
  CHECK(std::abs(avg_gate_distance(id, dep, BlochQuadrature{}).value - 0.5) <= 1e-12);
}

TEST_CASE("noisy example at p = 2/3 matches the closed form") {
  // Both outputs are qubit states with known Bloch vectors for every input, so
  // the integrand is the closed-form fidelity of the two vectors.
  const double p = 2.0 / 3.0;
  const KrausChannel e = paper_ep(p);
  const KrausChannel noisy = paper_eq7(p, 1.0);
  const double expected = oracle::qubit_fidelity(oracle::bloch_density(0, 0, 1.0 / 3.0), Matrix::Identity(2, 2) / 2.0);
  CHECK(std::abs(expected - (std::sqrt(2.0 / 3.0) + std::sqrt(1.0 / 3.0)) / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(avg_gate_fidelity(e, noisy, BlochQuadrature{}).value - expected) <= 1e-9);
}

TEST_CASE("average distance along the depolarizing family") {
  for (double r : {0.2, 0.5, 1.0}) {
    CAPTURE(r);
    CHECK(std::abs(avg_gate_distance(paper_ep(0.0), paper_eq7(0.0, r), BlochQuadrature{}).value - r / 2) <= 1e-12);
  }
}

TEST_CASE("quadrature agrees with a direct closed-form integral") {
  // F(E[psi], F[psi]) via the qubit formula, integrated on an independent
  // midpoint grid in (cos theta, phi).
  std::mt19937_64 rng(2);
  const KrausChannel a = random_channel(2, 2, rng);
  const KrausChannel b = random_channel(2, 2, rng);
  const int n = 400;
  double sum = 0.0;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    const double c = -1.0 + (2.0 * i + 1.0) / n;
    const double theta = std::acos(c);
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / n;
      Eigen::Vector2cd psi(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
      const Matrix rho = psi * psi.adjoint();
      sum += oracle::qubit_fidelity(a.apply_raw(rho), b.apply_raw(rho));
    }
  }
  CHECK(std::abs(avg_gate_fidelity(a, b, BlochQuadrature{}).value - sum / (n * n)) <= 1e-5);
}

TEST_CASE("estimator metadata") {
  const KrausChannel a = paper_ep(0.2);
  const KrausChannel b = paper_eq7(0.2, 0.4);
  const FidelityReport mc = avg_gate_fidelity(a, b);
  CHECK(std::holds_alternative<MonteCarlo>(mc.estimator));
  CHECK(std::get<MonteCarlo>(mc.estimator).samples == 10000);
  REQUIRE(mc.std_error.has_value());
  CHECK(*mc.std_error >= 0.0);
  const FidelityReport quad = avg_gate_fidelity(a, b, BlochQuadrature{});
  CHECK(std::holds_alternative<BlochQuadrature>(quad.estimator));
  CHECK_FALSE(quad.std_error.has_value());
  const FidelityReport worst = min_gate_fidelity(a, b);
  CHECK(std::holds_alternative<GridMinimization>(worst.estimator));
  REQUIRE(worst.extremizer.has_value());
  CHECK(avg_gate_fidelity(a, b, MonteCarlo{500, 9}).value == avg_gate_fidelity(a, b, MonteCarlo{500, 9}).value);
}

TEST_CASE("argument errors") {
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(avg_gate_fidelity(identity_channel(3), identity_channel(3), BlochQuadrature{}), DomainError);
  CHECK_THROWS_AS(avg_gate_fidelity(identity_channel(2), identity_channel(3)), DimensionError);
  CHECK_THROWS_AS(avg_gate_fidelity(identity_channel(2), identity_channel(2), MonteCarlo{1, 1}), DomainError);
  CHECK_THROWS_AS(min_gate_fidelity(identity_channel(3), identity_channel(3), GridMinimization{}), DomainError);
}

TEST_CASE("gauss legendre rule integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  for (int degree = 0; degree <= 15; ++degree) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], degree);
    const double exact = degree % 2 ? 0.0 : 2.0 / (degree + 1);
    CHECK(std::abs(sum - exact) <= 1e-14);
  }
  const QuadratureRule rule = bloch_quadrature_rule(BlochQuadrature{});
  double total = 0.0;
  for (double wt : rule.weights) total += wt;
  CHECK(std::abs(total - 1.0) <= 1e-14);
}

TEST_CASE("minimum fidelity against dephasing matches a dense grid") {
  for (double p : {1.0, 0.5, 0.3}) {
    CAPTURE(p);
    const KrausChannel z = dephasing(p);
    // F(psi, (1-p) psi + p Z psi Z) = sqrt(1 - p + p cos^2 theta).
    auto integrand = [p](double theta, double) { return std::sqrt(1.0 - p + p * std::cos(theta) * std::cos(theta)); };
    const double grid = oracle::grid_minimum(integrand, 1001, 1000);
    const FidelityReport worst = min_gate_fidelity(identity_channel(), z);
    CHECK(std::abs(worst.value - grid) <= 1e-6);
    CHECK(std::abs(worst.value - std::sqrt(1.0 - p)) <= 1e-9);
    // The minimizer lies on the equator.
    const Vector& psi = worst.extremizer->amplitudes();
    CHECK(std::abs(std::norm(psi(0)) - 0.5) <= 1e-4);
  }
}

TEST_CASE("minimum bounded by the average, gate-level Fuchs-van de Graaf") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const KrausChannel a = random_channel(2, 1 + i % 4, rng);
    const KrausChannel b = random_channel(2, 1 + (i + 1) % 4, rng);
    const double avg = avg_gate_fidelity(a, b, BlochQuadrature{}).value;
    CHECK(min_gate_fidelity(a, b).value <= avg + 1e-12);
    CHECK(1.0 - avg <= avg_gate_distance(a, b, BlochQuadrature{}).value + 1e-12);
    CHECK(max_gate_distance(a, b).value >= avg_gate_distance(a, b, BlochQuadrature{}).value - 1e-12);
  }
}

TEST_CASE("monte carlo agrees with quadrature within three standard errors") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const KrausChannel a = random_channel(2, 2, rng);
    const KrausChannel b = random_channel(2, 2, rng);
    const FidelityReport mc = avg_gate_fidelity(a, b, MonteCarlo{10000, 100u + i});
    const double quad = avg_gate_fidelity(a, b, BlochQuadrature{}).value;
    CHECK(std::abs(mc.value - quad) <= 3.0 * *mc.std_error);
  }
}

TEST_CASE("unitary invariance of the average") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    const KrausChannel e = random_channel(2, 2, rng);
    const KrausChannel f = random_channel(2, 3, rng);
    const Matrix u = haar_unitary(2, rng);
    const Matrix v = haar_unitary(2, rng);
    const double base = avg_gate_fidelity(e, f, BlochQuadrature{}).value;
    const double rotated = avg_gate_fidelity(conjugated(u, e, v), conjugated(u, f, v), BlochQuadrature{}).value;
    CHECK(std::abs(base - rotated) <= 1e-5);
  }
}

TEST_CASE("higher-dimensional channels use sampling and pattern search") {
  std::mt19937_64 rng(7);
  const KrausChannel a = random_channel(3, 2, rng);
  const KrausChannel b = random_channel(3, 2, rng);
  const FidelityReport avg = avg_gate_fidelity(a, b, MonteCarlo{4000, 1});
  const FidelityReport worst = min_gate_fidelity(a, b);
  CHECK(std::holds_alternative<MultiStartSearch>(worst.estimator));
  CHECK(worst.value <= avg.value);
  // Pattern search should beat the best of 20000 random inputs.
  double sampled = 1.0;
  for (int i = 0; i < 20000; ++i) {
    const Vector psi = haar_pure(HilbertSpec({3}), rng).amplitudes();
    sampled = std::min(sampled, fidelity_raw(a.apply_pure(psi), b.apply_pure(psi)));
  }
  CHECK(worst.value <= sampled + 1e-9);
}
