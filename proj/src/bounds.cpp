#include "qbc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbc/error.hpp"

namespace qbc {

namespace {

Matrix project_psd(const Matrix& x) { return psd_projection(hermitian_part(x)); }

Matrix project_ppt(const Matrix& x, const TensorLayout& layout) {
  const Matrix pt = partial_transpose(hermitian_part(x), layout, 1);
  return partial_transpose(psd_projection(hermitian_part(pt)), layout, 1);
}

// {Hermitian X : tr_B X = I/d_A}
Matrix project_marginal(const Matrix& x, const TensorLayout& layout) {
  const int d_a = layout.dims()[0];
  const int d_b = layout.dims()[1];
  const std::vector<int> keep{0};
  const Matrix residual =
      partial_trace(x, layout, keep) - Matrix::Identity(d_a, d_a) / static_cast<double>(d_a);
  return hermitian_part(x - kron(residual, Matrix::Identity(d_b, d_b)) / static_cast<double>(d_b));
}

}  // namespace

EBDistanceResult eb_distance(const KrausChannel& channel, const EbProjectionConfig& config) {
  const ChoiState choi = kraus_to_choi(channel);
  const int d_a = choi.input_dim();
  const int d_b = choi.output_dim();
  const int n = d_a * d_b;
  const TensorLayout layout({d_a, d_b});
  const Matrix& chi = choi.matrix();

  // Dykstra over three closed convex sets; converges to the Frobenius projection of chi.
  Matrix x = chi;
  Matrix inc_psd = Matrix::Zero(n, n);
  Matrix inc_ppt = Matrix::Zero(n, n);
  Matrix inc_marg = Matrix::Zero(n, n);
  int iterations = 0;
  double step = 0.0;
  bool converged = false;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Matrix previous = x;
    Matrix y = project_psd(x + inc_psd);
    inc_psd = x + inc_psd - y;
    x = std::move(y);
    y = project_ppt(x + inc_ppt, layout);
    inc_ppt = x + inc_ppt - y;
    x = std::move(y);
    y = project_marginal(x + inc_marg, layout);
    inc_marg = x + inc_marg - y;
    x = std::move(y);
    step = (x - previous).norm();
    iterations = it;
    if (step < config.step_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("EB projection did not converge in " + std::to_string(config.max_iterations) +
                               " iterations (last step " + std::to_string(step) + ")",
                           step);
  }

  // x satisfies the marginal constraint exactly; clear residual negativity by
  // mixing toward I/n, which also has marginal I/d_A and is strictly PPT.
  const double violation =
      std::max({0.0, -min_eigenvalue(x), -min_eigenvalue(hermitian_part(partial_transpose(x, layout, 1)))});
  const double t = violation / (violation + 1.0 / n);
  Matrix certified = (1.0 - t) * x + t * Matrix::Identity(n, n) / static_cast<double>(n);
  certified /= certified.trace().real();

  DensityMatrix nearest(HilbertSpec({d_a, d_b}), hermitian_part(certified));
  EBDistanceResult result{nearest, (chi - nearest.matrix()).norm(), trace_distance(choi.state(), nearest),
                          n <= 6, iterations};
  return result;
}

double channel_distance_bound(const KrausChannel& e, const KrausChannel& eb) {
  if (e.input_dim() != eb.input_dim() || e.output_dim() != eb.output_dim()) {
    throw DimensionError("channels have different dimensions");
  }
  return e.input_dim() * trace_distance(kraus_to_choi(e).state(), kraus_to_choi(eb).state());
}

DistanceBoundCheck channel_distance_bound(const KrausChannel& e, const DensityMatrix& rho, const KrausChannel& eb) {
  DistanceBoundCheck check;
  check.bound = channel_distance_bound(e, eb);
  check.observed = trace_distance(e.apply(rho), eb.apply(rho));
  check.holds = check.observed <= check.bound + 1e-9;
  return check;
}

FloorContext prepare_floor(const KrausChannel& e, const FloorOptions& options) {
  EBDistanceResult eb = eb_distance(e, options.projection);
  KrausChannel nearest = choi_to_kraus(ChoiState(eb.nearest_eb_choi));
  std::optional<HierarchyLevel> level;
  if (options.k_max > 0) level = max_broadcast_number(e, options.k_max, options.extension);
  return FloorContext{options.label, e.input_dim(), std::move(eb), std::move(nearest), level, options};
}

FidelityFloor fidelity_floor(const FloorContext& context, const KrausChannel& noise) {
  const KrausChannel& eb = context.nearest_eb_channel;
  if (noise.input_dim() != eb.input_dim() || noise.output_dim() != eb.output_dim()) {
    throw DimensionError("noise channel dimensions differ from the ideal channel");
  }
  const AverageMethod method = context.dim == 2 ? AverageMethod{context.options.quadrature}
                                                : AverageMethod{context.options.monte_carlo};
  FidelityFloor floor;
  floor.channel_id = context.label;
  floor.k_level = context.k_level;
  floor.delta_eb = context.dim * context.eb.trace_distance_upper;
  floor.noise_gap = context.dim * avg_gate_distance(eb, noise, method).value;
  floor.floor = std::clamp(1.0 - floor.delta_eb - floor.noise_gap, 0.0, 1.0);
  return floor;
}

FidelityFloor fidelity_floor(const KrausChannel& e, const KrausChannel& noise, const FloorOptions& options) {
  return fidelity_floor(prepare_floor(e, options), noise);
}

AssessmentReport assessment_report(const KrausChannel& e, const KrausChannel& realized, const KrausChannel& noise,
                                   const FloorOptions& options) {
  const AverageMethod method =
      e.input_dim() == 2 ? AverageMethod{options.quadrature} : AverageMethod{options.monte_carlo};
  AssessmentReport report;
  report.avg_fidelity = avg_gate_fidelity(e, realized, method).value;
  report.min_fidelity = min_gate_fidelity(e, realized).value;
  report.noise_fidelity = avg_gate_fidelity(e, noise, method).value;
  report.floor = fidelity_floor(e, noise, options);
  report.margin_above_floor = report.avg_fidelity - report.floor.floor;
  report.margin_above_noise = report.avg_fidelity - report.noise_fidelity;
  report.floor_vacuous = report.floor.floor <= 0.0;
  report.indistinct_from_noise = report.margin_above_noise < kIndistinctFromNoise;
  report.below_floor = report.avg_fidelity < report.floor.floor - 1e-6;

  std::ostringstream text;
  text.precision(6);
  text << std::fixed;
  text << "Average gate fidelity " << report.avg_fidelity << " against a floor of " << report.floor.floor
       << " (margin " << report.margin_above_floor << "); the worst-case noise model alone reaches "
       << report.noise_fidelity << " (margin " << report.margin_above_noise << ").";
  if (report.below_floor) {
    text << " The measured fidelity lies BELOW the floor, which no realization at least as good as the noise "
            "model can do: the noise model underestimates the actual noise.";
  }
  if (report.floor_vacuous) {
    text << " The floor is vacuous for this channel: it broadcasts to few parties, so noisy realizations can "
            "score low and any fidelity above the noise level is informative.";
  }
  if (report.indistinct_from_noise) {
    text << " The realization is within " << kIndistinctFromNoise
         << " of what the noise model achieves: the high fidelity does not by itself show that the ideal "
            "operation was implemented.";
  } else if (!report.below_floor) {
    text << " The realization is clearly distinguished from the noise model.";
  }
  report.verdict = text.str();
  return report;
}

}  // namespace qbc
