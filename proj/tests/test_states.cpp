#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbc/error.hpp"
#include "qbc/states.hpp"

using namespace qbc;

namespace {

DensityMatrix random_mixed_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double x, y, z;
  do {
    x = u(rng);
    y = u(rng);
    z = u(rng);
  } while (x * x + y * y + z * z > 1.0);
  return DensityMatrix(HilbertSpec::qubit(), oracle::bloch_density(x, y, z));
}

DensityMatrix phi_plus() {
  const auto b = oracle::bell_basis();
  return DensityMatrix(HilbertSpec({2, 2}), b[0] * b[0].adjoint());
}

}  // namespace

TEST_CASE("hilbert spec validation") {
  CHECK(HilbertSpec({2, 3}).total() == 6);
  CHECK(HilbertSpec({1, 2}).total() == 2);
  CHECK_THROWS_AS(HilbertSpec({1}), DimensionError);
  CHECK_THROWS_AS(HilbertSpec({2, 0}), DimensionError);
  CHECK_THROWS_AS(HilbertSpec({}), DimensionError);
}

TEST_CASE("density matrix rejects invalid input at construction") {
  Matrix m = Matrix::Identity(2, 2) / 2.0;
  CHECK_NOTHROW(DensityMatrix(HilbertSpec::qubit(), m));

  Matrix not_hermitian = m;
  not_hermitian(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(HilbertSpec::qubit(), not_hermitian), InvariantError);

  CHECK_THROWS_AS(DensityMatrix(HilbertSpec::qubit(), Matrix::Identity(2, 2)), InvariantError);
  CHECK_THROWS_AS(DensityMatrix(HilbertSpec::qubit(), Matrix::Zero(2, 2)), InvariantError);

  Matrix negative(2, 2);
  negative << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix(HilbertSpec::qubit(), negative), InvariantError);

  Matrix nan = m;
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(DensityMatrix(HilbertSpec::qubit(), nan), InvariantError);

  CHECK_THROWS_AS(DensityMatrix(HilbertSpec({2, 2}), m), DimensionError);
}

TEST_CASE("pure state normalization") {
  Vector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState(HilbertSpec::qubit(), v), InvariantError);
  CHECK_NOTHROW(PureState(HilbertSpec::qubit(), v / std::sqrt(2.0)));
}

TEST_CASE("fidelity examples") {
  std::mt19937_64 rng(7);
  const DensityMatrix rho = random_mixed_qubit(rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(HilbertSpec::qubit());
  for (int i = 0; i < 10; ++i) {
    const PureState psi = haar_pure(HilbertSpec::qubit(), rng);
    CHECK(fidelity(psi.density(), mixed) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  }

  // Bloch length 1/3 against I/2.
  const DensityMatrix shrunk(HilbertSpec::qubit(), oracle::bloch_density(0.0, 0.0, 1.0 / 3.0));
  const double expected = (std::sqrt(2.0 / 3.0) + std::sqrt(1.0 / 3.0)) / std::sqrt(2.0);
  CHECK(fidelity(shrunk, mixed) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(expected - 0.9856) <= 1e-4);
}

TEST_CASE("fidelity agrees with the closed-form qubit oracle") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix a = random_mixed_qubit(rng);
    const DensityMatrix b = random_mixed_qubit(rng);
    CHECK(fidelity(a, b) == doctest::Approx(oracle::qubit_fidelity(a.matrix(), b.matrix())).epsilon(1e-9));
    CHECK(trace_distance(a, b) ==
          doctest::Approx(oracle::qubit_trace_distance(a.matrix(), b.matrix())).epsilon(1e-12));
  }
}

TEST_CASE("trace distance examples") {
  const auto space = HilbertSpec::qubit();
  const DensityMatrix zero = DensityMatrix::basis_state(space, 0);
  const DensityMatrix one = DensityMatrix::basis_state(space, 1);
  CHECK(trace_distance(zero, zero) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
  const PureState psi = haar_pure(space, 3);
  CHECK(trace_distance(psi.density(), DensityMatrix::maximally_mixed(space)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(trace_distance(zero, DensityMatrix::maximally_mixed(HilbertSpec({3}))), DimensionError);
}

TEST_CASE("symmetry and Fuchs-van de Graaf on random pairs") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix a = random_mixed_qubit(rng);
    const DensityMatrix b = i % 2 ? random_mixed_qubit(rng) : haar_pure(HilbertSpec::qubit(), rng).density();
    const double f = fidelity(a, b);
    const double d = trace_distance(a, b);
    CHECK(std::abs(f - fidelity(b, a)) <= 1e-10);
    CHECK(std::abs(d - trace_distance(b, a)) <= 1e-10);
    CHECK(1.0 - f <= d + 1e-12);
    CHECK(d <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
  }
}

TEST_CASE("pure-state fidelity path matches the general path") {
  std::mt19937_64 rng(17);
  for (int dim : {2, 3, 4}) {
    const HilbertSpec space({dim});
    for (int i = 0; i < 50; ++i) {
      const PureState psi = haar_pure(space, rng);
      const PureState other = haar_pure(space, rng);
      const DensityMatrix sigma(space, 0.6 * other.density().matrix() + 0.4 * Matrix::Identity(dim, dim) / dim);
      CHECK(std::abs(fidelity(psi, sigma) - fidelity(psi.density(), sigma)) <= 1e-10);
    }
  }
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(19);
  const DensityMatrix a = random_mixed_qubit(rng);
  const DensityMatrix b(HilbertSpec({3}), haar_pure(HilbertSpec({3}), rng).density().matrix());
  const DensityMatrix ab = tensor(a, b);
  CHECK(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()) <= 1e-12);
  CHECK(max_abs(partial_trace(ab, {1}).matrix() - b.matrix()) <= 1e-12);
  CHECK(partial_trace(ab, {1, 0}).space() == ab.space());

  const DensityMatrix bell = phi_plus();
  CHECK(max_abs(partial_trace(bell, {1}).matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-12);
  CHECK(max_abs(partial_trace(bell, {0}).matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-12);

  CHECK_THROWS_AS(partial_trace(ab, {2}), DimensionError);
  CHECK_THROWS_AS(partial_trace(ab, {}), DimensionError);
  CHECK_THROWS_AS(partial_trace(ab, {0, 0}), DimensionError);
}

TEST_CASE("partial trace on three factors keeps ascending order") {
  std::mt19937_64 rng(23);
  const DensityMatrix a = random_mixed_qubit(rng);
  const DensityMatrix b = DensityMatrix(HilbertSpec({3}), haar_pure(HilbertSpec({3}), rng).density().matrix());
  const DensityMatrix c = random_mixed_qubit(rng);
  const DensityMatrix abc = tensor(tensor(a, b), c);
  const DensityMatrix ac = partial_trace(abc, {2, 0});
  CHECK(max_abs(ac.matrix() - tensor(a, c).matrix()) <= 1e-12);
  CHECK(std::abs(ac.matrix().trace().real() - 1.0) <= 1e-12);
}

TEST_CASE("partial transpose") {
  std::mt19937_64 rng(29);
  const DensityMatrix product = tensor(random_mixed_qubit(rng), random_mixed_qubit(rng));
  const Matrix pt = partial_transpose(product, 1);
  CHECK(min_eigenvalue(pt) >= -1e-12);

  const DensityMatrix bell = phi_plus();
  const RealVector spectrum = eigvalsh(partial_transpose(bell, 1));
  CHECK(spectrum(0) == doctest::Approx(-0.5));
  for (int i = 1; i < 4; ++i) CHECK(spectrum(i) == doctest::Approx(0.5));

  const DensityMatrix once(product.space(), pt);
  CHECK(max_abs(partial_transpose(once, 1) - product.matrix()) <= 1e-14);
  CHECK_THROWS_AS(partial_transpose(bell, 2), DimensionError);
}

TEST_CASE("haar sampling") {
  const auto space = HilbertSpec::qubit();
  const PureState s1 = haar_pure(space, 42);
  const PureState s2 = haar_pure(space, 42);
  CHECK(s1.amplitudes() == s2.amplitudes());
  CHECK(std::abs(s1.amplitudes().norm() - 1.0) <= 1e-12);

  std::mt19937_64 rng(5);
  double mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) mean += std::norm(haar_pure(space, rng).amplitudes()(0));
  CHECK(std::abs(mean / n - 0.5) <= 0.01);

  const Matrix u = haar_unitary(3, rng);
  CHECK(max_abs(u * u.adjoint() - Matrix::Identity(3, 3)) <= 1e-12);
}
