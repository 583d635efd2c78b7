#pragma once

// File formats of the command-line front end.
//
// Channel file (JSON), one of:
//   { "name": s, "dim": d, "kraus": [ op, ... ] }   op = [ row, ... ], row = [ [re, im], ... ]
//   { "name": s, "dim": d, "choi": matrix }           matrix in the same [re, im] layout
//   { "builtin": name, "params": { ... } }            see qbc::builtin; "unitary" also
//                                                     accepts "matrix" in params
//
// Curve CSV: header r,p,avg_fidelity,std_error,avg_trace_distance, LF endings,
// 12 significant digits, written to a temporary file and renamed into place.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbc/channels.hpp"

namespace qbc::io {

struct LoadedChannel {
  std::string name;
  KrausChannel channel;
};

LoadedChannel parse_channel(const std::string& text);
LoadedChannel load_channel(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Matrix& m);
/// `what` names the value in error messages.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

struct CurveRow {
  double r = 0.0;
  double p = 0.0;
  double avg_fidelity = 0.0;
  double std_error = 0.0;
  double avg_trace_distance = 0.0;
};

std::string format_curve_csv(const std::vector<CurveRow>& rows);
/// Atomic: writes a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Comma-separated list of decimals or fractions a/b.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace qbc::io
