#pragma once

#include <optional>
#include <string>

#include "qbc/extendibility.hpp"
#include "qbc/metrics.hpp"

namespace qbc {

struct EbProjectionConfig {
  int max_iterations = 20000;
  /// Stop when one full Dykstra cycle moves the iterate by less than this (Frobenius).
  double step_tol = 1e-12;
};

/// Nearest point to a Choi state in {PSD} n {PPT} n {tr_B X = I/d_A}, certified.
struct EBDistanceResult {
  /// Exactly feasible: the last Dykstra iterate mixed with I/(d_A d_B) just
  /// enough to clear any residual negative eigenvalue.
  DensityMatrix nearest_eb_choi;
  double frobenius_distance = 0.0;
  /// Trace distance to nearest_eb_choi; an upper bound on the minimum over
  /// entanglement-breaking channels (exact EB only when `exact`).
  double trace_distance_upper = 0.0;
  /// False beyond 2x3, where the PPT set is a relaxation of the separable set.
  bool exact = true;
  int iterations = 0;
};

EBDistanceResult eb_distance(const KrausChannel& channel, const EbProjectionConfig& config = {});

/// d * D(chi_e, chi_eb): bounds D(e[rho], eb[rho]) for every input rho.
double channel_distance_bound(const KrausChannel& e, const KrausChannel& eb);

struct DistanceBoundCheck {
  double bound = 0.0;
  double observed = 0.0;
  bool holds = true;
};

/// Evaluates both sides of the bound on one input; holds iff observed <= bound + 1e-9.
DistanceBoundCheck channel_distance_bound(const KrausChannel& e, const DensityMatrix& rho, const KrausChannel& eb);

struct FloorOptions {
  std::string label;
  BlochQuadrature quadrature{};
  /// Estimator for channels beyond qubits, where the quadrature is unavailable.
  MonteCarlo monte_carlo{};
  /// Largest k tried when classifying the channel; 0 skips classification.
  int k_max = 3;
  ExtensionConfig extension{};
  EbProjectionConfig projection{};
};

/// Everything about the ideal channel that the floor needs, independent of the noise model.
struct FloorContext {
  std::string label;
  int dim = 2;
  EBDistanceResult eb;
  KrausChannel nearest_eb_channel;
  std::optional<HierarchyLevel> k_level;
  FloorOptions options;
};

FloorContext prepare_floor(const KrausChannel& e, const FloorOptions& options = {});

/// Lower bound on the average gate fidelity between e and any realization at
/// least as good as `noise`: max(0, 1 - delta_eb - noise_gap).
struct FidelityFloor {
  std::string channel_id;
  std::optional<HierarchyLevel> k_level;
  /// d * D(chi_e, chi_eb*)
  double delta_eb = 0.0;
  /// d * average D(eb*[psi], noise[psi])
  double noise_gap = 0.0;
  double floor = 0.0;
};

FidelityFloor fidelity_floor(const FloorContext& context, const KrausChannel& noise);
FidelityFloor fidelity_floor(const KrausChannel& e, const KrausChannel& noise, const FloorOptions& options = {});

/// A realization whose average fidelity is within this of the noise model's is flagged.
inline constexpr double kIndistinctFromNoise = 0.05;

struct AssessmentReport {
  double avg_fidelity = 0.0;
  double min_fidelity = 0.0;
  /// Average fidelity reached by the worst-case noise realization itself.
  double noise_fidelity = 0.0;
  FidelityFloor floor;
  double margin_above_floor = 0.0;
  double margin_above_noise = 0.0;
  bool floor_vacuous = false;
  bool indistinct_from_noise = false;
  bool below_floor = false;
  std::string verdict;
};

AssessmentReport assessment_report(const KrausChannel& e, const KrausChannel& realized, const KrausChannel& noise,
                                   const FloorOptions& options = {});

}  // namespace qbc
