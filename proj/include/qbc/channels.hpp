#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbc/states.hpp"

namespace qbc {

inline constexpr double kCompletenessTol = 1e-9;
inline constexpr double kChoiMarginalTol = 1e-9;
inline constexpr double kKrausDropTol = 1e-10;

/// CPTP map rho -> sum_i K_i rho K_i^dag with d_out x d_in Kraus operators.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> operators);

  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return output_dim_; }
  const std::vector<Matrix>& operators() const noexcept { return operators_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Unvalidated application on a raw input-dimension matrix.
  Matrix apply_raw(const Matrix& rho) const;
  /// Output for a pure input; avoids forming the input density matrix.
  Matrix apply_pure(const Vector& psi) const;

 private:
  std::vector<Matrix> operators_;
  int input_dim_ = 0;
  int output_dim_ = 0;
};

/// The state (1 (x) E)|phi+><phi+| on A (x) B with |phi+> = sum_i |ii>/sqrt(d_A).
/// The channel acts on the second factor.
class ChoiState {
 public:
  ChoiState(DensityMatrix choi);
  ChoiState(Matrix choi, int input_dim, int output_dim);

  const DensityMatrix& state() const noexcept { return state_; }
  const Matrix& matrix() const noexcept { return state_.matrix(); }
  int input_dim() const noexcept { return state_.space().dims()[0]; }
  int output_dim() const noexcept { return state_.space().dims()[1]; }

 private:
  DensityMatrix state_;
};

/// E[rho] = tr_anc U (rho (x) |0><0|) U^dag with U on system (x) ancilla.
class StinespringDilation {
 public:
  StinespringDilation(Matrix unitary, int system_dim, int ancilla_dim);

  const Matrix& unitary() const noexcept { return unitary_; }
  int system_dim() const noexcept { return system_dim_; }
  int ancilla_dim() const noexcept { return ancilla_dim_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Kraus operators K_i = (1 (x) <i|) U (1 (x) |0>).
  KrausChannel reconstruct() const;

 private:
  Matrix unitary_;
  int system_dim_;
  int ancilla_dim_;
};

ChoiState kraus_to_choi(const KrausChannel& channel);
/// Kraus operators from scaled eigenvectors of the Choi matrix; eigenvalues below 1e-10 dropped.
KrausChannel choi_to_kraus(const ChoiState& choi);
/// d_A tr_A[chi (rho^T (x) 1)], transpose in the computational basis.
DensityMatrix apply_via_choi(const ChoiState& choi, const DensityMatrix& rho);
Matrix apply_via_choi_raw(const Matrix& choi, int input_dim, int output_dim, const Matrix& rho);

/// Isometry V = sum_i K_i (x) |i> completed to a unitary by Gram-Schmidt over
/// the standard basis in lexicographic order. Needs d_in == d_out.
StinespringDilation stinespring(const KrausChannel& channel);

/// Kraus set {sqrt(1-w) A_i} u {sqrt(w) B_j}; a side with zero weight is omitted.
KrausChannel mix(const KrausChannel& a, const KrausChannel& b, double weight);

/// Trace distance between the Choi states of two channels.
double choi_distance(const KrausChannel& a, const KrausChannel& b);

// Builtin channels.
KrausChannel identity_channel(int dim = 2);
KrausChannel unitary_channel(const Matrix& unitary);
/// (1-r) rho + r I/d; r = 1 is the full depolarizer with d^2 Kraus operators.
KrausChannel depolarizing(double r, int dim = 2);
/// (1-p) rho + p/2 (X rho X + Z rho Z) on a qubit.
KrausChannel paper_ep(double p);
/// (1-r) E_p[rho] + r I/2.
KrausChannel paper_eq7(double p, double r);
KrausChannel amplitude_damping(double gamma);
/// (1-p) rho + p Z rho Z.
KrausChannel dephasing(double p);

/// Random CPTP map from a Haar-random isometry with `kraus_rank` blocks.
KrausChannel random_channel(int dim, int kraus_rank, std::mt19937_64& rng);

/// Named lookup used by the channel file format. Numeric parameters by name;
/// unitaries are passed separately.
KrausChannel builtin(const std::string& name, const std::map<std::string, double>& params,
                     const Matrix* unitary = nullptr);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace qbc
