#include "qbc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "qbc/error.hpp"
#include "qbc/kernels.hpp"

namespace qbc {

using kernels::Integrand;

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

QuadratureRule bloch_quadrature_rule(const BlochQuadrature& scheme) {
  if (scheme.n_theta < 1 || scheme.n_phi < 1) throw DomainError("quadrature sizes must be positive");
  std::vector<double> cos_nodes, cos_weights;
  gauss_legendre(scheme.n_theta, cos_nodes, cos_weights);
  QuadratureRule rule;
  rule.states.reserve(static_cast<std::size_t>(scheme.n_theta) * scheme.n_phi);
  for (int i = 0; i < scheme.n_theta; ++i) {
    const double theta = std::acos(std::clamp(cos_nodes[i], -1.0, 1.0));
    for (int j = 0; j < scheme.n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / scheme.n_phi;
      rule.states.push_back(PureState::bloch(theta, phi).amplitudes());
      rule.weights.push_back(cos_weights[i] / (2.0 * scheme.n_phi));
    }
  }
  return rule;
}

namespace {

void require_same_dims(const KrausChannel& e, const KrausChannel& f) {
  if (e.input_dim() != f.input_dim() || e.output_dim() != f.output_dim()) {
    throw DimensionError("channels have different dimensions");
  }
}

GateReport average(const KrausChannel& e, const KrausChannel& f, const AverageMethod& method,
                   Integrand kind) {
  require_same_dims(e, f);
  GateReport report;
  report.estimator = std::visit([](const auto& m) -> Estimator { return m; }, method);

  if (const auto* quad = std::get_if<BlochQuadrature>(&method)) {
    if (e.input_dim() != 2) throw DomainError("Bloch quadrature is only defined for qubit channels");
    const QuadratureRule rule = bloch_quadrature_rule(*quad);
    std::vector<double> values(rule.states.size());
    kernels::evaluate_parallel(e, f, rule.states, kind, values);
    report.value = std::clamp(kernels::weighted_sum(values, rule.weights), 0.0, 1.0);
    return report;
  }

  const auto& mc = std::get<MonteCarlo>(method);
  if (mc.samples < 2) throw DomainError("Monte Carlo needs at least two samples");
  // The sample list is generated serially from the seed before any parallel work.
  std::mt19937_64 rng(mc.seed);
  const HilbertSpec space({e.input_dim()});
  std::vector<Vector> states;
  states.reserve(mc.samples);
  for (std::size_t i = 0; i < mc.samples; ++i) states.push_back(haar_pure(space, rng).amplitudes());
  std::vector<double> values(states.size());
  kernels::evaluate_parallel(e, f, states, kind, values);
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double variance = pairwise_sum(sq) / (n - 1.0);
  report.value = std::clamp(mean, 0.0, 1.0);
  report.std_error = std::sqrt(variance / n);
  return report;
}

struct Extremum {
  double value;
  Vector state;
};

// Minimizes sign * integrand over qubit pure states.
Extremum grid_minimize(const KrausChannel& e, const KrausChannel& f, Integrand kind, double sign,
                       const GridMinimization& opts) {
  if (opts.n_theta < 2 || opts.n_phi < 1) throw DomainError("grid sizes too small");
  const double dtheta = std::numbers::pi / (opts.n_theta - 1);
  const double dphi = 2.0 * std::numbers::pi / opts.n_phi;
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(opts.n_theta) * opts.n_phi);
  for (int i = 0; i < opts.n_theta; ++i) {
    for (int j = 0; j < opts.n_phi; ++j) states.push_back(PureState::bloch(i * dtheta, j * dphi).amplitudes());
  }
  std::vector<double> values(states.size());
  kernels::evaluate_parallel(e, f, states, kind, values);

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (sign * values[i] < sign * values[best]) best = i;
  }
  double theta = static_cast<double>(best / opts.n_phi) * dtheta;
  double phi = static_cast<double>(best % opts.n_phi) * dphi;
  double current = sign * values[best];

  auto objective = [&](double t, double p) {
    return sign * kernels::integrand(e, f, PureState::bloch(t, p).amplitudes(), kind);
  };
  double step_theta = dtheta;
  double step_phi = dphi;
  for (int iter = 0; iter < opts.refinement_iterations; ++iter) {
    const double candidates[4][2] = {{theta + step_theta, phi},
                                     {theta - step_theta, phi},
                                     {theta, phi + step_phi},
                                     {theta, phi - step_phi}};
    double best_value = current;
    int best_move = -1;
    for (int c = 0; c < 4; ++c) {
      const double v = objective(candidates[c][0], candidates[c][1]);
      if (v < best_value) {
        best_value = v;
        best_move = c;
      }
    }
    const double improvement = current - best_value;
    if (best_move >= 0) {
      theta = candidates[best_move][0];
      phi = candidates[best_move][1];
      current = best_value;
    }
    if (improvement < opts.improvement_tol) {
      step_theta *= 0.5;
      step_phi *= 0.5;
    }
  }
  return {current, PureState::bloch(theta, phi).amplitudes()};
}

Extremum multistart_minimize(const KrausChannel& e, const KrausChannel& f, Integrand kind, double sign,
                             const MultiStartSearch& opts) {
  const int d = e.input_dim();
  const HilbertSpec space({d});
  std::mt19937_64 rng(opts.seed);
  std::vector<Vector> pool;
  for (int i = 0; i < d; ++i) pool.push_back(Vector::Unit(d, i));
  for (int i = 0; i < opts.candidate_pool; ++i) pool.push_back(haar_pure(space, rng).amplitudes());
  std::vector<double> values(pool.size());
  kernels::evaluate_parallel(e, f, pool, kind, values);

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sign * values[a] < sign * values[b]; });

  auto objective = [&](const Vector& v) { return sign * kernels::integrand(e, f, v, kind); };
  Extremum best{sign * values[order[0]], pool[order[0]]};
  const int starts = std::min<int>(opts.random_starts, static_cast<int>(order.size()));
  for (int s = 0; s < starts; ++s) {
    Vector x = pool[order[s]];
    double fx = sign * values[order[s]];
    double step = 0.25;
    for (int iter = 0; iter < opts.iterations && step > 1e-9; ++iter) {
      bool moved = false;
      for (int c = 0; c < 2 * d; ++c) {
        const Complex delta = c < d ? Complex(step, 0.0) : Complex(0.0, step);
        for (double dir : {1.0, -1.0}) {
          Vector y = x;
          y(c % d) += dir * delta;
          y /= y.norm();
          const double fy = objective(y);
          if (fy < fx) {
            x = std::move(y);
            fx = fy;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (fx < best.value) best = {fx, x};
  }
  return best;
}

GateReport worst_case(const KrausChannel& e, const KrausChannel& f, Integrand kind, double sign) {
  require_same_dims(e, f);
  const HilbertSpec space({e.input_dim()});
  if (e.input_dim() == 2) {
    const GridMinimization opts;
    const Extremum x = grid_minimize(e, f, kind, sign, opts);
    return {std::clamp(sign * x.value, 0.0, 1.0), opts, std::nullopt, PureState(space, x.state)};
  }
  const MultiStartSearch opts;
  const Extremum x = multistart_minimize(e, f, kind, sign, opts);
  return {std::clamp(sign * x.value, 0.0, 1.0), opts, std::nullopt, PureState(space, x.state)};
}

}  // namespace

FidelityReport avg_gate_fidelity(const KrausChannel& e, const KrausChannel& f, const AverageMethod& method) {
  return average(e, f, method, Integrand::fidelity);
}

DistanceReport avg_gate_distance(const KrausChannel& e, const KrausChannel& f, const AverageMethod& method) {
  return average(e, f, method, Integrand::trace_distance);
}

FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f) {
  return worst_case(e, f, Integrand::fidelity, 1.0);
}

FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f, const GridMinimization& opts) {
  require_same_dims(e, f);
  if (e.input_dim() != 2) throw DomainError("grid minimization is only defined for qubit channels");
  const Extremum x = grid_minimize(e, f, Integrand::fidelity, 1.0, opts);
  return {std::clamp(x.value, 0.0, 1.0), opts, std::nullopt, PureState(HilbertSpec::qubit(), x.state)};
}

FidelityReport min_gate_fidelity(const KrausChannel& e, const KrausChannel& f, const MultiStartSearch& opts) {
  require_same_dims(e, f);
  const Extremum x = multistart_minimize(e, f, Integrand::fidelity, 1.0, opts);
  return {std::clamp(x.value, 0.0, 1.0), opts, std::nullopt, PureState(HilbertSpec({e.input_dim()}), x.state)};
}

DistanceReport max_gate_distance(const KrausChannel& e, const KrausChannel& f) {
  return worst_case(e, f, Integrand::trace_distance, -1.0);
}

}  // namespace qbc
