#include "channel_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qbc/error.hpp"

namespace qbc::io {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) throw ParseError(what + ", row " + std::to_string(r) + ": expected an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      if (cols == 0) throw ParseError(what + ", row 0: empty row");
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(what + ", row " + std::to_string(r) + ": has " + std::to_string(row.size()) +
                       " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& entry = row[c];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        throw ParseError(what + ", row " + std::to_string(r) + ", col " + std::to_string(c) +
                         ": expected [re, im]");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

namespace {

int read_dim(const json& doc) {
  if (!doc.contains("dim")) return -1;
  if (!doc["dim"].is_number_integer()) throw ParseError("\"dim\" must be an integer");
  return doc["dim"].get<int>();
}

LoadedChannel from_builtin(const json& doc) {
  if (!doc["builtin"].is_string()) throw ParseError("\"builtin\" must be a string");
  const std::string name = doc["builtin"].get<std::string>();
  std::map<std::string, double> params;
  Matrix unitary;
  bool has_unitary = false;
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) throw ParseError("\"params\" must be an object");
    for (const auto& [key, value] : p.items()) {
      if (key == "matrix") {
        unitary = matrix_from_json(value, "params.matrix");
        has_unitary = true;
      } else if (value.is_number()) {
        params[key] = value.get<double>();
      } else if (value.is_string()) {
        params[key] = parse_number_list(value.get<std::string>()).at(0);
      } else {
        throw ParseError("parameter \"" + key + "\" must be a number");
      }
    }
  }
  std::string label = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : name;
  return {label, builtin(name, params, has_unitary ? &unitary : nullptr)};
}

}  // namespace

LoadedChannel parse_channel(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("channel file must hold a JSON object");
  if (doc.contains("builtin")) return from_builtin(doc);

  const std::string name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "";
  const int dim = read_dim(doc);
  if (doc.contains("kraus")) {
    const json& ops = doc["kraus"];
    if (!ops.is_array() || ops.empty()) throw ParseError("\"kraus\" must be a nonempty array of operators");
    std::vector<Matrix> kraus;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      kraus.push_back(matrix_from_json(ops[i], "Kraus operator " + std::to_string(i)));
      if (dim > 0 && (kraus.back().cols() != dim)) {
        throw ParseError("Kraus operator " + std::to_string(i) + " does not match \"dim\" = " + std::to_string(dim));
      }
    }
    return {name, KrausChannel(std::move(kraus))};
  }
  if (doc.contains("choi")) {
    Matrix choi = matrix_from_json(doc["choi"], "Choi matrix");
    const int d_in = dim > 0 ? dim : static_cast<int>(std::lround(std::sqrt(static_cast<double>(choi.rows()))));
    int d_out = d_in;
    if (doc.contains("output_dim")) {
      if (!doc["output_dim"].is_number_integer()) throw ParseError("\"output_dim\" must be an integer");
      d_out = doc["output_dim"].get<int>();
    }
    if (choi.rows() != d_in * d_out || choi.cols() != d_in * d_out) {
      throw ParseError("Choi matrix size does not match the channel dimensions");
    }
    return {name, choi_to_kraus(ChoiState(std::move(choi), d_in, d_out))};
  }
  throw ParseError("channel file needs one of \"kraus\", \"choi\" or \"builtin\"");
}

LoadedChannel load_channel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read channel file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  LoadedChannel loaded = parse_channel(buffer.str());
  if (loaded.name.empty()) loaded.name = path.stem().string();
  return loaded;
}

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string format_curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "r,p,avg_fidelity,std_error,avg_trace_distance\n";
  for (const CurveRow& row : rows) {
    out += fmt12(row.r) + "," + fmt12(row.p) + "," + fmt12(row.avg_fidelity) + "," + fmt12(row.std_error) + "," +
           fmt12(row.avg_trace_distance) + "\n";
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("failed while writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ParseError("empty entry in number list \"" + text + "\"");
    item = item.substr(first, last - first + 1);
    const auto slash = item.find('/');
    auto parse = [&](const std::string& s) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("not a number: \"" + s + "\"");
      return v;
    };
    if (slash == std::string::npos) {
      out.push_back(parse(item));
    } else {
      const double den = parse(item.substr(slash + 1));
      if (den == 0.0) throw ParseError("zero denominator in \"" + item + "\"");
      out.push_back(parse(item.substr(0, slash)) / den);
    }
  }
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

}  // namespace qbc::io
