#pragma once

// Per-input-state integrands of the gate metrics, evaluated over a list of
// pure input states. Two implementations with identical arithmetic per state:
// a plain loop kept as the reference, and an OpenMP loop. Each state's value
// lands in its own output slot, so the two agree bit for bit regardless of
// thread count; reductions happen afterwards in a fixed order.

#include <span>
#include <vector>

#include "qbc/channels.hpp"

namespace qbc::kernels {

enum class Integrand { fidelity, trace_distance };

/// F(a[psi], b[psi]) or D(a[psi], b[psi]) for one input state.
double integrand(const KrausChannel& a, const KrausChannel& b, const Vector& psi, Integrand kind);

void evaluate_serial(const KrausChannel& a, const KrausChannel& b, std::span<const Vector> states,
                     Integrand kind, std::span<double> out);
void evaluate_parallel(const KrausChannel& a, const KrausChannel& b, std::span<const Vector> states,
                       Integrand kind, std::span<double> out);

/// Weighted sum via pairwise summation of w_i * v_i.
double weighted_sum(std::span<const double> values, std::span<const double> weights);

}  // namespace qbc::kernels
