// Serial reference loop vs the OpenMP loop on the gate-metric integrands.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qbc/kernels.hpp"

namespace {

struct Inputs {
  qbc::KrausChannel a;
  qbc::KrausChannel b;
  std::vector<qbc::Vector> states;
};

Inputs make_inputs(int dim, std::size_t n) {
  std::mt19937_64 rng(1);
  Inputs in{qbc::random_channel(dim, 3, rng), qbc::random_channel(dim, 3, rng), {}};
  for (std::size_t i = 0; i < n; ++i) in.states.push_back(qbc::haar_pure(qbc::HilbertSpec({dim}), rng).amplitudes());
  return in;
}

template <bool Parallel>
void fidelity_kernel(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::vector<double> out(in.states.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      qbc::kernels::evaluate_parallel(in.a, in.b, in.states, qbc::kernels::Integrand::fidelity, out);
    } else {
      qbc::kernels::evaluate_serial(in.a, in.b, in.states, qbc::kernels::Integrand::fidelity, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.states.size()));
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

}  // namespace

BENCHMARK(fidelity_kernel<false>)->Args({2, 2048})->Args({2, 10000})->Args({4, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(fidelity_kernel<true>)->Args({2, 2048})->Args({2, 10000})->Args({4, 10000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
