#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "channel_io.hpp"
#include "qbc/bounds.hpp"
#include "qbc/error.hpp"
#include "qbc/extendibility.hpp"
#include "qbc/metrics.hpp"

namespace qbc::cli {

namespace {

using nlohmann::json;

std::string num(double v, const char* format = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

void print_matrix(std::ostream& out, const Matrix& m, bool imaginary) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << num(imaginary ? m(i, j).imag() : m(i, j).real(), "%+.9f");
    }
    out << "\n";
  }
}

// Values within this of zero print as 0 so output does not depend on rounding noise.
double tidy(double v) { return std::abs(v) < 1e-13 ? 0.0 : v; }

struct MethodChoice {
  std::string method = "auto";
  std::size_t samples = MonteCarlo{}.samples;
  std::uint64_t seed = kDefaultSeed;
};

AverageMethod resolve_method(const MethodChoice& choice, int dim) {
  if (choice.method == "mc") return MonteCarlo{choice.samples, choice.seed};
  if (choice.method == "quad") return BlochQuadrature{};
  return dim == 2 ? AverageMethod{BlochQuadrature{}} : AverageMethod{MonteCarlo{choice.samples, choice.seed}};
}

std::string describe_method(const AverageMethod& method) {
  if (const auto* mc = std::get_if<MonteCarlo>(&method)) {
    return "monte carlo, " + std::to_string(mc->samples) + " Haar samples, seed " + std::to_string(mc->seed);
  }
  const auto& q = std::get<BlochQuadrature>(method);
  return "bloch quadrature, " + std::to_string(q.n_theta) + " Gauss-Legendre x " + std::to_string(q.n_phi) +
         " azimuthal nodes";
}

json level_json(const std::optional<HierarchyLevel>& level) {
  if (!level) return nullptr;
  return {{"k_lo", level->k_lo},
          {"k_hi", level->k_hi},
          {"infinite", level->infinite},
          {"capped", level->capped},
          {"label", level->describe()}};
}

std::string classification(const HierarchyLevel& level) {
  if (level.infinite) return "entanglement-breaking";
  if (level.is_private()) return "private";
  return "broadcastable to " + level.describe() + " parties";
}

void require_writable_parent(const std::filesystem::path& path) {
  const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  if (!std::filesystem::is_directory(parent, ec)) {
    throw IoError("output directory " + parent.string() + " does not exist");
  }
}

int cmd_choi(const std::string& file, bool as_json, std::ostream& out) {
  const io::LoadedChannel loaded = io::load_channel(file);
  const ChoiState choi = kraus_to_choi(loaded.channel);
  RealVector eigenvalues = eigvalsh(choi.matrix()).reverse();
  for (double& v : eigenvalues) v = tidy(v);
  const PptResult ppt = is_ppt(choi.state());
  const EntanglementBreakingResult eb = is_entanglement_breaking(loaded.channel);

  if (as_json) {
    json doc = {{"name", loaded.name},
                {"dim", choi.input_dim()},
                {"output_dim", choi.output_dim()},
                {"choi", io::matrix_to_json(choi.matrix())},
                {"eigenvalues", std::vector<double>(eigenvalues.begin(), eigenvalues.end())},
                {"ppt", ppt.ppt},
                {"ppt_min_eigenvalue", tidy(ppt.min_eigenvalue)},
                {"entanglement_breaking", eb.entanglement_breaking},
                {"entanglement_breaking_exact", eb.exact}};
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << "channel: " << loaded.name << " (" << choi.input_dim() << " -> " << choi.output_dim() << ")\n";
  out << "choi matrix, real part:\n";
  print_matrix(out, choi.matrix(), false);
  out << "choi matrix, imaginary part:\n";
  print_matrix(out, choi.matrix(), true);
  out << "eigenvalues:";
  for (double v : eigenvalues) out << " " << num(v, "%.9f");
  out << "\n";
  out << "ppt: " << (ppt.ppt ? "yes" : "no") << " (min partial-transpose eigenvalue "
      << num(tidy(ppt.min_eigenvalue), "%.9f") << ")\n";
  out << "entanglement-breaking: " << eb.describe() << "\n";
  return kOk;
}

int cmd_fidelity(const std::string& file_a, const std::string& file_b, const MethodChoice& choice,
                 const std::string& csv_path, bool as_json, std::ostream& out) {
  const io::LoadedChannel a = io::load_channel(file_a);
  const io::LoadedChannel b = io::load_channel(file_b);
  if (a.channel.input_dim() != b.channel.input_dim() || a.channel.output_dim() != b.channel.output_dim()) {
    throw DimensionError("channels " + a.name + " and " + b.name + " have different dimensions");
  }
  if (!csv_path.empty()) require_writable_parent(csv_path);
  const AverageMethod method = resolve_method(choice, a.channel.input_dim());
  const FidelityReport avg = avg_gate_fidelity(a.channel, b.channel, method);
  const FidelityReport worst = min_gate_fidelity(a.channel, b.channel);
  const DistanceReport dist = avg_gate_distance(a.channel, b.channel, method);
  const std::string avg_label = describe_method(method);
  const std::string worst_label = a.channel.input_dim() == 2 ? "grid search with coordinate refinement"
                                                             : "multi-start pattern search";

  if (!csv_path.empty()) {
    std::string csv = "quantity,value,std_error,estimator\n";
    csv += "avg_fidelity," + num(avg.value) + "," + num(avg.std_error.value_or(0.0)) + "," + avg_label + "\n";
    csv += "min_fidelity," + num(worst.value) + ",0," + worst_label + "\n";
    csv += "avg_trace_distance," + num(dist.value) + "," + num(dist.std_error.value_or(0.0)) + "," + avg_label +
           "\n";
    io::write_text_atomic(csv_path, csv);
  }
  if (as_json) {
    json doc = {{"channel_a", a.name},
                {"channel_b", b.name},
                {"avg_fidelity", avg.value},
                {"avg_fidelity_std_error", avg.std_error ? json(*avg.std_error) : json(nullptr)},
                {"min_fidelity", worst.value},
                {"avg_trace_distance", dist.value},
                {"avg_trace_distance_std_error", dist.std_error ? json(*dist.std_error) : json(nullptr)},
                {"estimator", avg_label},
                {"min_estimator", worst_label}};
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << "channels: " << a.name << " vs " << b.name << "\n";
  out << "avg gate fidelity F_a = " << num(avg.value, "%.9f");
  if (avg.std_error) out << " +- " << num(*avg.std_error, "%.2e");
  out << "  [" << avg_label << "]\n";
  out << "min gate fidelity F_w = " << num(worst.value, "%.9f") << "  [" << worst_label << "]\n";
  out << "avg trace distance D_a = " << num(dist.value, "%.9f");
  if (dist.std_error) out << " +- " << num(*dist.std_error, "%.2e");
  out << "  [" << avg_label << "]\n";
  return kOk;
}

int cmd_extend(const std::string& file, int k, std::optional<int> k_max, std::ostream& out) {
  const io::LoadedChannel loaded = io::load_channel(file);
  const ExtendibilityCertificate cert = test_k_extendible({kraus_to_choi(loaded.channel), k, true});
  out << "channel: " << loaded.name << "\n";
  out << "k = " << k << ": " << to_string(cert.verdict) << "\n";
  out << "residual: " << num(cert.residual, "%.3e") << "\n";
  out << "iterations: " << cert.iterations << "\n";
  if (cert.verdict == Verdict::extendible) {
    out << "marginal error: " << num(cert.marginal_error, "%.3e") << "\n";
    out << "classification: broadcastable to at least " << k << " parties\n";
  } else if (cert.verdict == Verdict::not_extendible && k == 2) {
    out << "classification: private\n";
  } else if (cert.verdict == Verdict::not_extendible) {
    out << "classification: broadcastable to fewer than " << k << " parties\n";
  }
  if (k_max) {
    const HierarchyLevel level = max_broadcast_number(loaded.channel, *k_max);
    out << "max broadcast number (k_max = " << *k_max << "): " << level.describe() << "\n";
    out << "classification: " << classification(level) << "\n";
  }
  return cert.verdict == Verdict::inconclusive ? kSolverFailure : kOk;
}

int cmd_floor(const std::string& file, const std::string& noise_file, const std::string& realized_file,
              int k_max, bool as_json, std::ostream& out) {
  const io::LoadedChannel e = io::load_channel(file);
  const io::LoadedChannel noise = io::load_channel(noise_file);
  const io::LoadedChannel realized = realized_file.empty() ? noise : io::load_channel(realized_file);
  FloorOptions opts;
  opts.label = e.name;
  opts.k_max = k_max;
  const AssessmentReport report = assessment_report(e.channel, realized.channel, noise.channel, opts);

  if (as_json) {
    json doc = {{"channel", e.name},
                {"noise", noise.name},
                {"realized", realized.name},
                {"avg_fidelity", report.avg_fidelity},
                {"min_fidelity", report.min_fidelity},
                {"noise_fidelity", report.noise_fidelity},
                {"floor", report.floor.floor},
                {"delta_eb", report.floor.delta_eb},
                {"noise_gap", report.floor.noise_gap},
                {"k_level", level_json(report.floor.k_level)},
                {"margin_above_floor", report.margin_above_floor},
                {"margin_above_noise", report.margin_above_noise},
                {"floor_vacuous", report.floor_vacuous},
                {"indistinct_from_noise", report.indistinct_from_noise},
                {"below_floor", report.below_floor},
                {"verdict", report.verdict}};
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << "channel: " << e.name << "  noise: " << noise.name << "  realized: " << realized.name << "\n";
  out << "avg gate fidelity: " << num(report.avg_fidelity, "%.9f") << "\n";
  out << "min gate fidelity: " << num(report.min_fidelity, "%.9f") << "\n";
  out << "noise-model fidelity: " << num(report.noise_fidelity, "%.9f") << "\n";
  out << "distance to entanglement-breaking set: " << num(report.floor.delta_eb, "%.9f") << "\n";
  out << "noise gap: " << num(report.floor.noise_gap, "%.9f") << "\n";
  out << "fidelity floor: " << num(report.floor.floor, "%.9f") << "\n";
  if (report.floor.k_level) out << "broadcast level: " << report.floor.k_level->describe() << "\n";
  out << "verdict: " << report.verdict << "\n";
  return kOk;
}

struct Fig1Options {
  std::string p_list = "0,1/3,2/3";
  int r_steps = 101;
  MethodChoice method{"quad"};
  std::string out_path = "fig1.csv";
};

constexpr double kAnchorTol = 0.005;

const io::CurveRow* find_row(const std::vector<io::CurveRow>& rows, double p, double r) {
  for (const io::CurveRow& row : rows) {
    if (std::abs(row.p - p) < 1e-12 && std::abs(row.r - r) < 1e-12) return &row;
  }
  return nullptr;
}

int cmd_fig1(const Fig1Options& opts, std::ostream& out) {
  const std::vector<double> ps = io::parse_number_list(opts.p_list);
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p = " + num(p) + " lies outside [0, 1]");
  }
  if (opts.r_steps < 2) throw DomainError("--r-steps must be at least 2");
  if (opts.out_path != "-") require_writable_parent(opts.out_path);
  const AverageMethod method = resolve_method(opts.method, 2);

  std::vector<io::CurveRow> rows;
  rows.reserve(ps.size() * static_cast<std::size_t>(opts.r_steps));
  for (double p : ps) {
    const KrausChannel ideal = paper_ep(p);
    for (int i = 0; i < opts.r_steps; ++i) {
      const double r = static_cast<double>(i) / (opts.r_steps - 1);
      const KrausChannel noisy = paper_eq7(p, r);
      const FidelityReport f = avg_gate_fidelity(ideal, noisy, method);
      const DistanceReport d = avg_gate_distance(ideal, noisy, method);
      rows.push_back({r, p, f.value, f.std_error.value_or(0.0), d.value});
    }
  }
  const std::string csv = io::format_curve_csv(rows);
  if (opts.out_path == "-") {
    out << csv;
  } else {
    io::write_text_atomic(opts.out_path, csv);
    out << "wrote " << rows.size() << " rows to " << opts.out_path << "\n";
  }

  const double anchor_b_p = 2.0 / 3.0;
  if (const io::CurveRow* a = find_row(rows, 0.0, 1.0)) {
    const bool pass = std::abs(a->avg_fidelity - 0.7071) <= kAnchorTol;
    out << "anchor A (p=0, r=1): avg_fidelity " << num(a->avg_fidelity, "%.6f") << ", expected 0.7071 +- "
        << kAnchorTol << ": " << (pass ? "PASS" : "FAIL") << "\n";
  } else {
    out << "anchor A (p=0, r=1): not in grid\n";
  }
  if (const io::CurveRow* b = find_row(rows, anchor_b_p, 1.0)) {
    double lowest = 1.0;
    for (const io::CurveRow& row : rows) {
      if (std::abs(row.p - anchor_b_p) < 1e-12) lowest = std::min(lowest, row.avg_fidelity);
    }
    const bool pass = std::abs(b->avg_fidelity - 0.9856) <= kAnchorTol && lowest >= 0.98;
    out << "anchor B (p=2/3, r=1): avg_fidelity " << num(b->avg_fidelity, "%.6f") << ", expected 0.9856 +- "
        << kAnchorTol << "; lowest over r " << num(lowest, "%.6f") << ", expected >= 0.98: "
        << (pass ? "PASS" : "FAIL") << "\n";
  } else {
    out << "anchor B (p=2/3, r=1): not in grid\n";
  }
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse:
      return kParseFailure;
    case ErrorKind::io:
      return kIoFailure;
    case ErrorKind::convergence:
      return kSolverFailure;
    case ErrorKind::dimension:
    case ErrorKind::invariant:
    case ErrorKind::domain:
      return kInvariantFailure;
  }
  return kInvariantFailure;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
      return "parse error";
    case ErrorKind::io:
      return "i/o error";
    case ErrorKind::convergence:
      return "solver did not converge";
    case ErrorKind::dimension:
      return "dimension mismatch";
    case ErrorKind::invariant:
      return "invariant violated";
    case ErrorKind::domain:
      return "argument out of range";
  }
  return "error";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum channel analysis: gate fidelities, broadcasting hierarchy and fidelity floors", "qbc"};
  app.require_subcommand(1);

  bool as_json = false;
  std::string file_a, file_b, realized, csv_path;
  MethodChoice method;
  int k = 2;
  int k_max = 0;
  int floor_k_max = 3;
  Fig1Options fig1;

  auto* choi = app.add_subcommand("choi", "Print the Choi matrix, its spectrum and PPT/EB verdicts");
  choi->add_option("channel", file_a, "channel file")->required();
  choi->add_flag("--json", as_json, "emit JSON (re-ingestible as a channel file)");

  auto add_method = [&](CLI::App* cmd, MethodChoice& target) {
    cmd->add_option("--method", target.method, "estimator for averages")
        ->check(CLI::IsMember({"mc", "quad", "auto"}));
    cmd->add_option("--samples", target.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", target.seed, "Monte Carlo seed");
  };

  auto* fid = app.add_subcommand("fidelity", "Average and worst-case gate fidelity between two channels");
  fid->add_option("channel_a", file_a, "ideal channel file")->required();
  fid->add_option("channel_b", file_b, "compared channel file")->required();
  add_method(fid, method);
  fid->add_option("--out", csv_path, "also write the figures to this CSV file");
  fid->add_flag("--json", as_json, "emit JSON");

  auto* ext = app.add_subcommand("extend", "k-extendibility of the Choi state and broadcast classification");
  ext->add_option("channel", file_a, "channel file")->required();
  ext->add_option("--k", k, "number of B copies")->check(CLI::Range(2, 16));
  auto* kmax_opt = ext->add_option("--kmax", k_max, "sweep the hierarchy up to this k")->check(CLI::Range(1, 16));

  auto* flr = app.add_subcommand("floor", "Fidelity floor and assessment of a realization");
  flr->add_option("channel", file_a, "ideal channel file")->required();
  flr->add_option("noise", file_b, "worst-case noise model file")->required();
  flr->add_option("--realized", realized, "realized channel file (defaults to the noise model)");
  flr->add_option("--kmax", floor_k_max, "hierarchy depth for the classification, 0 skips it")
      ->check(CLI::Range(0, 16));
  flr->add_flag("--json", as_json, "emit JSON");

  auto* fig = app.add_subcommand("fig1", "Average gate fidelity and trace distance curves of the noisy example");
  fig->add_option("--p-list", fig1.p_list, "comma-separated p values, fractions allowed");
  fig->add_option("--r-steps", fig1.r_steps, "grid points in r over [0, 1]");
  add_method(fig, fig1.method);
  fig->add_option("--out", fig1.out_path, "CSV output path, - for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qbc: " << e.what() << "\n";
    return kParseFailure;
  }

  try {
    if (choi->parsed()) return cmd_choi(file_a, as_json, out);
    if (fid->parsed()) return cmd_fidelity(file_a, file_b, method, csv_path, as_json, out);
    if (ext->parsed()) {
      return cmd_extend(file_a, k, kmax_opt->count() ? std::optional<int>(k_max) : std::nullopt, out);
    }
    if (flr->parsed()) return cmd_floor(file_a, file_b, realized, floor_k_max, as_json, out);
    if (fig->parsed()) return cmd_fig1(fig1, out);
  } catch (const Error& e) {
    err << "qbc: " << kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kParseFailure;
}

}  // namespace qbc::cli
