#pragma once

// File formats: CSV datasets (header row of column names), TSV weight
// matrices and edge lists (1-based vertex indices in all human-facing
// output), DOT graph export, JSON fit results and run manifests.

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fde/forest.hpp"
#include "fde/solvers.hpp"
#include "fde/types.hpp"

namespace fde {

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_number(const std::string& field, const std::string& path, std::size_t line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line) + ": not a number: '" + field + "'");
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  if (pos != field.size())
    throw DataError(path + ":" + std::to_string(line) + ": trailing junk in '" + field + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// First row: column names. Every following row: one numeric value per column.
inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  Dataset ds;
  for (auto& name : detail::split(detail::trim(line), ',')) {
    name = detail::trim(name);
    if (name.empty()) throw DataError(path + ":1: empty column name");
    ds.column_names.push_back(name);
  }
  const std::size_t d = ds.column_names.size();
  std::vector<double> buffer;
  std::size_t rows = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    auto fields = detail::split(t, ',');
    if (fields.size() != d)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                      " fields, found " + std::to_string(fields.size()));
    for (const auto& f : fields) buffer.push_back(detail::parse_number(detail::trim(f), path, lineno));
    ++rows;
  }
  ds.values.resize(rows, static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < d; ++c)
      ds.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = buffer[r * d + c];
  ds.validate();
  return ds;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  for (std::size_t c = 0; c < ds.column_names.size(); ++c)
    out << (c ? "," : "") << ds.column_names[c];
  out << '\n';
  for (Eigen::Index r = 0; r < ds.n(); ++r) {
    for (Eigen::Index c = 0; c < ds.d(); ++c) out << (c ? "," : "") << ds.values(r, c);
    out << '\n';
  }
}

// TSV with a header row of labels, then the d x d matrix.
inline void write_weights_tsv(const WeightMatrix& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  for (std::size_t c = 0; c < w.labels.size(); ++c) out << (c ? "\t" : "") << w.labels[c];
  out << '\n';
  for (Eigen::Index i = 0; i < w.d(); ++i) {
    for (Eigen::Index j = 0; j < w.d(); ++j) out << (j ? "\t" : "") << w.w(i, j);
    out << '\n';
  }
}

// Columns i, j, weight; vertices are 1-based on disk.
inline void write_edges_tsv(const Forest& f, const std::string& path,
                            const WeightMatrix* weights = nullptr) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  out << "i\tj\tweight\n";
  for (const Edge& e : f.edges()) {
    double w = weights ? (*weights)(e.first, e.second) : 1.0;
    out << e.first + 1 << '\t' << e.second + 1 << '\t' << w << '\n';
  }
}

// Reads an edge-list TSV (1-based). The vertex count is the given d or, when
// d == 0, the largest index seen.
inline Forest load_edges_tsv(const std::string& path, int d = 0) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  int max_vertex = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t == "i\tj\tweight") continue;
    auto fields = detail::split(t, '\t');
    if (fields.size() < 2)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected at least i and j");
    int i = static_cast<int>(detail::parse_number(fields[0], path, lineno));
    int j = static_cast<int>(detail::parse_number(fields[1], path, lineno));
    if (i < 1 || j < 1)
      throw DataError(path + ":" + std::to_string(lineno) + ": vertex indices are 1-based");
    if (d > 0 && (i > d || j > d))
      throw DataError(path + ":" + std::to_string(lineno) + ": vertex " +
                      std::to_string(std::max(i, j)) + " exceeds d=" + std::to_string(d));
    edges.push_back(make_edge(i - 1, j - 1));
    max_vertex = std::max({max_vertex, i, j});
  }
  return Forest(d > 0 ? d : max_vertex, edges);
}

// Undirected DOT output with an optional per-vertex fill color map.
inline void write_dot(const Forest& f, const std::string& path,
                      const std::vector<std::string>* colors = nullptr) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "graph forest {\n  node [shape=circle];\n";
  for (int v = 0; v < f.d(); ++v) {
    out << "  " << v + 1;
    if (colors && v < static_cast<int>(colors->size()) && !(*colors)[v].empty())
      out << " [style=filled, fillcolor=\"" << (*colors)[v] << "\"]";
    out << ";\n";
  }
  for (const Edge& e : f.edges()) out << "  " << e.first + 1 << " -- " << e.second + 1 << ";\n";
  out << "}\n";
}

inline nlohmann::json edges_to_json(const Forest& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Edge& e : f.edges()) arr.push_back({e.first + 1, e.second + 1});
  return arr;
}

// Structured fit document: edge lists, insertion trace, objective history,
// convergence data, plus a caller-supplied config echo.
inline nlohmann::json fit_to_json(const FitResult& fit, const std::vector<std::string>& labels,
                                  const nlohmann::json& config_echo) {
  nlohmann::json trace = nlohmann::json::array();
  for (const TraceEntry& e : fit.trace)
    trace.push_back({e.i + 1, e.j + 1, e.adjusted_weight});
  return nlohmann::json{{"labels", labels},
                        {"tree_edges", edges_to_json(fit.tree)},
                        {"pruned_edges", edges_to_json(fit.pruned)},
                        {"insertion_trace", trace},
                        {"objective_per_iter", fit.objective_per_iter},
                        {"iterations", fit.iterations},
                        {"converged", fit.converged},
                        {"config", config_echo}};
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// FNV-1a over the file bytes; stable fingerprint for manifests.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + hex;
}

}  // namespace fde
