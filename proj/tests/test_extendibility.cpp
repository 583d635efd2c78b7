#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbc/error.hpp"
#include "qbc/extendibility.hpp"
#include "support.hpp"

using namespace qbc;

namespace {

ChoiState isotropic(double eta) {
  return ChoiState(eta * oracle::bell_diagonal({1, 0, 0, 0}) + (1 - eta) * Matrix::Identity(4, 4) / 4.0, 2, 2);
}

void check_extension(const ExtendibilityCertificate& cert, const ChoiState& target, int k) {
  REQUIRE(cert.verdict == Verdict::extendible);
  REQUIRE(cert.extension.has_value());
  const DensityMatrix& x = *cert.extension;
  CHECK(x.space().subsystems() == static_cast<std::size_t>(k + 1));
  for (int i = 1; i <= k; ++i) {
    CHECK(max_abs(partial_trace(x, {0, i}).matrix() - target.matrix()) <= 1e-7);
  }
}

bool solver_extendible(double eta) {
  return test_k_extendible({isotropic(eta), 2, true}).verdict == Verdict::extendible;
}

}  // namespace

TEST_CASE("maximally entangled state is not 2-extendible") {
  const ChoiState bell = kraus_to_choi(identity_channel());
  for (bool symmetrize : {true, false}) {
    const ExtendibilityCertificate cert = test_k_extendible({bell, 2, symmetrize});
    CHECK(cert.verdict == Verdict::not_extendible);
    CHECK(cert.residual >= ExtensionConfig{}.infeasibility_gap);
    CHECK_FALSE(cert.extension.has_value());
  }
}

TEST_CASE("maximally mixed state extends to every order") {
  const ChoiState mixed = kraus_to_choi(depolarizing(1.0));
  for (int k : {1, 2, 3, 4}) {
    CAPTURE(k);
    check_extension(test_k_extendible({mixed, k, true}), mixed, k);
  }
}

TEST_CASE("isotropic 2-extendibility threshold agrees with the ansatz oracle") {
  const oracle::IsotropicAnsatz ansatz;
  double lo = 0.3, hi = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ansatz.extendible(mid) ? lo : hi) = mid;
  }
  const double oracle_threshold = lo;
  CHECK(std::abs(oracle_threshold - 2.0 / 3.0) <= 1e-5);

  lo = 0.3;
  hi = 1.0;
  for (int i = 0; i < 12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (solver_extendible(mid) ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - oracle_threshold) <= 0.01);

  // Away from the threshold the solver gives definite answers on both sides.
  for (double eta : {0.4, 0.6}) CHECK(test_k_extendible({isotropic(eta), 2, true}).verdict == Verdict::extendible);
  for (double eta : {0.8, 0.95}) {
    CHECK(test_k_extendible({isotropic(eta), 2, true}).verdict == Verdict::not_extendible);
  }
}

TEST_CASE("symmetrization is lossless: random separable states") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const ChoiState target = test_support::random_separable_choi(rng);
    CHECK(is_ppt(target.state()).ppt);
    check_extension(test_k_extendible({target, 2, true}), target, 2);
    check_extension(test_k_extendible({target, 3, true}), target, 3);
  }
}

TEST_CASE("unsymmetrized solver agrees") {
  const ChoiState target = kraus_to_choi(paper_ep(0.8));
  check_extension(test_k_extendible({target, 2, false}), target, 2);
  CHECK(test_k_extendible({kraus_to_choi(paper_ep(0.1)), 2, false}).verdict == Verdict::not_extendible);
}

TEST_CASE("hierarchy nesting: reduced extensions certify lower orders") {
  const ChoiState target = kraus_to_choi(paper_ep(0.6));
  const ExtendibilityCertificate cert = test_k_extendible({target, 3, true});
  check_extension(cert, target, 3);
  const DensityMatrix reduced = partial_trace(*cert.extension, {0, 1, 2});
  for (int i : {1, 2}) CHECK(max_abs(partial_trace(reduced, {0, i}).matrix() - target.matrix()) <= 1e-7);
  CHECK(test_k_extendible({target, 2, true}).verdict == Verdict::extendible);
}

TEST_CASE("solver is deterministic") {
  const ChoiState target = kraus_to_choi(paper_ep(0.4));
  const auto a = test_k_extendible({target, 3, true});
  const auto b = test_k_extendible({target, 3, true});
  CHECK(a.verdict == b.verdict);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual == b.residual);
}

TEST_CASE("problem validation") {
  const ChoiState target = kraus_to_choi(identity_channel(3));
  CHECK_THROWS_AS(test_k_extendible({target, 5, true}), DimensionError);
  CHECK_THROWS_AS(test_k_extendible({target, 0, true}), DomainError);
  ExtensionConfig small;
  small.dimension_cap = 8;
  CHECK_THROWS_AS(test_k_extendible({kraus_to_choi(identity_channel()), 3, true}, small), DimensionError);
}

TEST_CASE("ppt test") {
  std::mt19937_64 rng(2);
  const DensityMatrix product = tensor(haar_pure(HilbertSpec::qubit(), rng).density(),
                                       haar_pure(HilbertSpec::qubit(), rng).density());
  CHECK(is_ppt(product).ppt);
  const PptResult bell = is_ppt(kraus_to_choi(identity_channel()).state());
  CHECK_FALSE(bell.ppt);
  CHECK(bell.min_eigenvalue == doctest::Approx(-0.5));
  CHECK_THROWS_AS(is_ppt(DensityMatrix::maximally_mixed(HilbertSpec({2, 2, 2}))), DimensionError);

  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    const auto w = oracle::bell_weights(kraus_to_choi(paper_ep(p)).matrix());
    const bool separable = *std::max_element(w.begin(), w.end()) <= 0.5 + 1e-12;
    CAPTURE(p);
    CHECK(is_ppt(kraus_to_choi(paper_ep(p)).state()).ppt == separable);
  }
}

TEST_CASE("entanglement-breaking classification") {
  CHECK(is_entanglement_breaking(depolarizing(1.0)).entanglement_breaking);
  CHECK_FALSE(is_entanglement_breaking(identity_channel()).entanglement_breaking);
  const auto ep9 = is_entanglement_breaking(paper_ep(0.9));
  CHECK(ep9.entanglement_breaking);
  CHECK(ep9.exact);
  const auto dep3 = is_entanglement_breaking(depolarizing(1.0, 3));
  CHECK(dep3.entanglement_breaking);
  CHECK_FALSE(dep3.exact);
  CHECK(dep3.describe().find("necessary") != std::string::npos);
  CHECK(is_entanglement_breaking(identity_channel(3)).exact);
}

TEST_CASE("broadcast channel from an unequal extension") {
  // chi_identity on A B1 with a maximally mixed B2: the A marginal is fine but
  // the two B marginals differ.
  const DensityMatrix x = tensor(kraus_to_choi(identity_channel()).state(),
                                 DensityMatrix::maximally_mixed(HilbertSpec::qubit()));
  const BroadcastChannel ch = broadcasting_channel_from_extension(x);
  CHECK(ch.parties() == 2);
  const DensityMatrix zero = DensityMatrix::basis_state(HilbertSpec::qubit(), 0);
  CHECK(ch.marginal_disparity(zero) == doctest::Approx(0.5));
  CHECK(max_abs(ch.output_marginal(zero, 1).matrix() - zero.matrix()) <= 1e-12);
}

TEST_CASE("extension without a maximally mixed A marginal is rejected") {
  Matrix m = Matrix::Zero(8, 8);
  m(0, 0) = 1.0;
  const DensityMatrix x(HilbertSpec({2, 2, 2}), m);
  try {
    broadcasting_channel_from_extension(x);
    FAIL("expected NotTracePreservingError");
  } catch (const NotTracePreservingError& e) {
    CHECK(e.deficit() == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(broadcasting_channel_from_extension(DensityMatrix::maximally_mixed(HilbertSpec({2, 2, 3}))),
                  DimensionError);
}

TEST_CASE("broadcasting the full depolarizer") {
  const ChoiState mixed = kraus_to_choi(depolarizing(1.0));
  const auto cert = test_k_extendible({mixed, 2, true});
  REQUIRE(cert.extension.has_value());
  const BroadcastChannel ch = broadcasting_channel_from_extension(*cert.extension);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = haar_pure(HilbertSpec::qubit(), rng).density();
    for (int party : {1, 2}) {
      CHECK(max_abs(ch.output_marginal(rho, party).matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-9);
    }
  }
  CHECK(max_abs(kraus_to_choi(local_map(ch, 1)).matrix() - Matrix::Identity(4, 4) / 4.0) <= 1e-9);
  CHECK_THROWS_AS(local_map(ch, 3), DimensionError);
  CHECK_THROWS_AS(ch.output_marginal(DensityMatrix::maximally_mixed(HilbertSpec::qubit()), 0), DimensionError);
}

TEST_CASE("broadcasting construction for an extendible noisy channel") {
  const KrausChannel e = paper_ep(0.8);
  const auto cert = test_k_extendible({kraus_to_choi(e), 2, true});
  REQUIRE(cert.extension.has_value());
  const BroadcastChannel ch = broadcasting_channel_from_extension(*cert.extension);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = haar_pure(HilbertSpec::qubit(), rng).density();
    CHECK(ch.marginal_disparity(rho) <= 1e-6);
    CHECK(std::abs(ch.apply(rho).matrix().trace().real() - 1.0) <= 1e-9);
  }
  const KrausChannel one = local_map(ch, 1);
  const KrausChannel two = local_map(ch, 2);
  CHECK(choi_distance(one, e) <= 1e-6);
  CHECK(choi_distance(one, two) <= 1e-6);
}

TEST_CASE("broadcast hierarchy") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 3; ++i) {
    const HierarchyLevel level = max_broadcast_number(unitary_channel(haar_unitary(2, rng)), 3);
    CHECK(level.is_private());
    CHECK(level.exact());
  }
  const HierarchyLevel dep = max_broadcast_number(depolarizing(1.0), 4);
  CHECK(dep.infinite);
  CHECK(dep.describe().find("entanglement-breaking") != std::string::npos);

  int previous = 0;
  for (double p : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    CAPTURE(p);
    const HierarchyLevel level = max_broadcast_number(paper_ep(p), 3);
    const int value = level.infinite ? 1000 : level.k_lo;
    CHECK(value >= previous);
    previous = value;
  }
  CHECK_THROWS_AS(max_broadcast_number(identity_channel(), 0), DomainError);
}
