#pragma once

// k-extendibility (k-shareability) of bipartite states and the broadcasting
// channels they induce.
//
// A state chi on A (x) B is k-extendible when some state X on A (x) B^k has
// every A B_i marginal equal to chi. The solver searches for X with Dykstra's
// alternating projections between
//   (a) the PSD cone, restricted to the face forced by the kernel of chi: if
//       chi v = 0 then any extension annihilates v on every A B_i pair, so X
//       is supported on the intersection of range(chi)_{A B_i} (x) H_rest;
//   (b) the affine set of Hermitian X whose A B_1 marginal is chi and which
//       are invariant under every permutation of the B factors (or, with
//       symmetrize off, whose A B_i marginals all equal chi).
//
// Restricting to permutation-invariant X loses nothing: averaging any
// equal-marginal extension over the B permutations keeps it PSD, keeps its
// trace and keeps every A B_i marginal equal to chi. Hence a symmetric
// extension exists iff any extension does.

#include <cstddef>
#include <optional>
#include <string>

#include "qbc/channels.hpp"
#include "qbc/error.hpp"

namespace qbc {

struct ExtensionConfig {
  double feasibility_tol = 1e-7;
  double infeasibility_gap = 1e-4;
  double marginal_tol = 1e-7;
  int max_iterations = 20000;
  int stall_window = 500;
  double stall_relative_change = 1e-9;
  int dimension_cap = 256;
  /// Eigenvalues of the target below this are treated as its kernel.
  double kernel_tol = 1e-10;
};

struct ExtensionProblem {
  ChoiState target;
  int k = 2;
  bool symmetrize = true;
};

enum class Verdict { extendible, not_extendible, inconclusive };

std::string to_string(Verdict v);

struct ExtendibilityCertificate {
  Verdict verdict = Verdict::inconclusive;
  /// Present iff extendible: a state on A (x) B^k with subsystem dims {d_A, d_B, ..., d_B}.
  std::optional<DensityMatrix> extension;
  /// Frobenius distance between the final PSD and affine iterates.
  double residual = 0.0;
  int iterations = 0;
  /// Largest elementwise deviation of an A B_i marginal of the extension from the target.
  double marginal_error = 0.0;
};

ExtendibilityCertificate test_k_extendible(const ExtensionProblem& problem, const ExtensionConfig& config = {});

struct PptResult {
  bool ppt = false;
  double min_eigenvalue = 0.0;
};

/// Positive partial transpose test on the second factor of a bipartite state.
PptResult is_ppt(const DensityMatrix& rho);

struct EntanglementBreakingResult {
  bool entanglement_breaking = false;
  /// True for 2x2 Choi states where PPT is equivalent to separability. Otherwise
  /// the verdict is the PPT test only, a necessary condition.
  bool exact = false;
  double min_eigenvalue = 0.0;
  std::string describe() const;
};

EntanglementBreakingResult is_entanglement_breaking(const KrausChannel& channel);

/// The k-output map rho -> d_A tr_A[X (rho^T (x) 1_{B_1...B_k})] built from an extension X.
class BroadcastChannel {
 public:
  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return output_dim_; }
  int parties() const noexcept { return parties_; }
  const DensityMatrix& extension() const noexcept { return extension_; }

  /// Joint output on B_1 ... B_k.
  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Output of party i (1-based).
  DensityMatrix output_marginal(const DensityMatrix& rho, int party) const;
  /// Largest pairwise trace distance between single-party outputs.
  double marginal_disparity(const DensityMatrix& rho) const;

 private:
  friend BroadcastChannel broadcasting_channel_from_extension(const DensityMatrix&);
  BroadcastChannel(DensityMatrix extension, int input_dim, int output_dim, int parties);

  DensityMatrix extension_;
  int input_dim_;
  int output_dim_;
  int parties_;
};

/// Thrown when the extension's A marginal is not I/d_A, which would make the
/// induced map fail to preserve trace.
class NotTracePreservingError : public InvariantError {
 public:
  NotTracePreservingError(const std::string& what, double deficit) : InvariantError(what), deficit_(deficit) {}
  /// max |tr_B X - I/d_A| elementwise.
  double deficit() const noexcept { return deficit_; }

 private:
  double deficit_;
};

inline constexpr double kBroadcastMarginalTol = 1e-6;

/// Extension dims must be {d_A, d_B, ..., d_B} with at least one B factor.
BroadcastChannel broadcasting_channel_from_extension(const DensityMatrix& extension);

/// The single-output channel of party i (1-based); its Choi state is the A B_i marginal.
KrausChannel local_map(const BroadcastChannel& channel, int party);

/// Position of a channel in the broadcasting hierarchy S_inf c ... c S_2 c S_1.
struct HierarchyLevel {
  /// Largest k certified extendible.
  int k_lo = 1;
  /// Smallest upper bound established; equals k_max when no failure was seen.
  int k_hi = 1;
  bool infinite = false;
  /// No failure up to k_max; the true level may exceed k_hi.
  bool capped = false;

  bool exact() const noexcept { return infinite || (k_lo == k_hi && !capped); }
  bool is_private() const noexcept { return !infinite && k_hi == 1; }
  std::string describe() const;
};

HierarchyLevel max_broadcast_number(const KrausChannel& channel, int k_max, const ExtensionConfig& config = {});

}  // namespace qbc
