#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qbc/channels.hpp"

namespace qbc {

inline constexpr std::uint64_t kDefaultSeed = 20100517;

/// Mean over Haar-random pure inputs drawn from one seeded stream.
struct MonteCarlo {
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
};

/// Qubit-only product rule over the Bloch sphere: Gauss-Legendre in cos(theta)
/// times a uniform midpoint grid in phi.
struct BlochQuadrature {
  int n_theta = 32;
  int n_phi = 64;
};

/// Dense (theta, phi) grid followed by shrinking-step coordinate descent (qubits).
struct GridMinimization {
  int n_theta = 200;
  int n_phi = 400;
  int refinement_iterations = 50;
  double improvement_tol = 1e-10;
};

/// Multi-start pattern search over normalized amplitudes (any dimension).
struct MultiStartSearch {
  int random_starts = 16;
  int candidate_pool = 4096;
  int iterations = 400;
  std::uint64_t seed = kDefaultSeed;
};

using AverageMethod = std::variant<MonteCarlo, BlochQuadrature>;
using Estimator = std::variant<MonteCarlo, BlochQuadrature, GridMinimization, MultiStartSearch>;

/// A gate-level figure of merit with the estimator that produced it.
/// std_error is present iff the estimator is Monte Carlo; extremizer is the
/// optimizing input for the worst-case variants.
struct GateReport {
  double value = 0.0;
  Estimator estimator;
  std::optional<double> std_error;
  std::optional<PureState> extremizer;
};

using FidelityReport = GateReport;
using DistanceReport = GateReport;

/// Integral of F(e[psi], f[psi]) over Haar-random pure psi.
FidelityReport avg_gate_fidelity(const KrausChannel& e, const KrausChannel& f,
                                 const AverageMethod& method = MonteCarlo{});
/// Minimum of F(e[psi], f[psi]) over pure psi. Joint concavity of the fidelity
/// makes pure inputs sufficient for the minimum over all inputs.
FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f);
FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f, const GridMinimization& opts);
FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f, const MultiStartSearch& opts);

DistanceReport avg_gate_distance(const KrausChannel& e, const KrausChannel& f,
                                 const AverageMethod& method = MonteCarlo{});
/// Worst-case (maximum) trace distance over pure inputs.
DistanceReport max_gate_distance(const KrausChannel& e, const KrausChannel& f);

/// Bloch-sphere quadrature nodes as qubit amplitude vectors with weights summing to 1.
struct QuadratureRule {
  std::vector<Vector> states;
  std::vector<double> weights;
};
QuadratureRule bloch_quadrature_rule(const BlochQuadrature& scheme);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace qbc
