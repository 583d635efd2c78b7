#include "qbc/kernels.hpp"

#include <exception>

#include "qbc/error.hpp"

namespace qbc::kernels {

double integrand(const KrausChannel& a, const KrausChannel& b, const Vector& psi, Integrand kind) {
  const Matrix rho = a.apply_pure(psi);
  const Matrix sigma = b.apply_pure(psi);
  return kind == Integrand::fidelity ? fidelity_raw(rho, sigma) : trace_distance_raw(rho, sigma);
}

namespace {

void check_sizes(std::span<const Vector> states, std::span<double> out) {
  if (states.size() != out.size()) throw DimensionError("kernel output span size mismatch");
}

}  // namespace

void evaluate_serial(const KrausChannel& a, const KrausChannel& b, std::span<const Vector> states,
                     Integrand kind, std::span<double> out) {
  check_sizes(states, out);
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = integrand(a, b, states[i], kind);
}

void evaluate_parallel(const KrausChannel& a, const KrausChannel& b, std::span<const Vector> states,
                       Integrand kind, std::span<double> out) {
  check_sizes(states, out);
  const auto n = static_cast<std::ptrdiff_t>(states.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = integrand(a, b, states[i], kind);
    } catch (...) {
#pragma omp critical(qbc_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw DimensionError("weights and values differ in length");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] * weights[i];
  return pairwise_sum(terms);
}

}  // namespace qbc::kernels
