#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qpp/grid.hpp"
#include "qpp/types.hpp"

namespace qpp::io {

using json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed at full double
/// precision (17 significant digits), so written reports are byte-stable and
/// round-trip exactly.
inline void dump17(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw InputError("json: non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump17(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        dump17(e, out);
      }
      out += ']';
      break;
    }
    default:
      out += j.dump();
  }
}

inline std::string dump17(const json& j) {
  std::string out;
  dump17(j, out);
  out += '\n';
  return out;
}

// Matrix schema: {"rows": n, "cols": m, "data": [[[re, im], ...], ...]}.

inline json matrix_to_json(const CMatd& M) {
  json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  json data = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < M.cols(); ++k)
      row.push_back(json::array({M(i, k).real(), M(i, k).imag()}));
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  return j;
}

inline CMatd json_to_matrix(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw InputError("matrix json: expected {rows, cols, data}");
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  if (rows < 0 || cols < 0) throw InputError("matrix json: negative dimension");
  const auto& data = j.at("data");
  if (!data.is_array() || Index(data.size()) != rows)
    throw InputError("matrix json: row count mismatch");
  CMatd M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = data.at(std::size_t(i));
    if (!row.is_array() || Index(row.size()) != cols)
      throw InputError("matrix json: column count mismatch");
    for (Index k = 0; k < cols; ++k) {
      const auto& e = row.at(std::size_t(k));
      if (!e.is_array() || e.size() != 2)
        throw InputError("matrix json: entries must be [re, im]");
      M(i, k) = std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  if (!M.allFinite()) throw InputError("matrix json: non-finite entry");
  return M;
}

// Grid schema: {"components": [[a, b], ...], "points": [t, ...],
//               "values": [matrix, ...]}.

inline json grid_to_json(const grid::GridElement& x) {
  json j;
  json comps = json::array();
  for (const auto& [a, b] : x.domain.components) comps.push_back(json::array({a, b}));
  j["components"] = std::move(comps);
  j["points"] = x.domain.points;
  json vals = json::array();
  for (const auto& v : x.values) vals.push_back(matrix_to_json(v));
  j["values"] = std::move(vals);
  return j;
}

inline grid::GridElement json_to_grid(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("components") || !j.contains("points") ||
      !j.contains("values"))
    throw InputError("grid json: expected {components, points, values}");
  grid::GridDomain dom;
  for (const auto& c : j.at("components")) {
    if (!c.is_array() || c.size() != 2) throw InputError("grid json: malformed component");
    dom.components.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  }
  if (dom.components.empty()) throw InputError("grid json: no components");
  dom.points = j.at("points").get<std::vector<double>>();
  for (double t : dom.points) {
    bool found = false;
    for (std::size_t c = 0; c < dom.components.size(); ++c) {
      const auto [a, b] = dom.components[c];
      const double slack = 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
      if (t >= a - slack && t <= b + slack) {
        dom.component_of.push_back(Index(c));
        found = true;
        break;
      }
    }
    if (!found) throw InputError("grid json: point outside every component");
  }
  if (dom.points.size() % dom.components.size() == 0)
    dom.points_per_component = Index(dom.points.size() / dom.components.size());
  grid::GridElement x;
  x.domain = std::move(dom);
  for (const auto& v : j.at("values")) x.values.push_back(json_to_matrix(v));
  x.validate();
  return x;
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("parse error in " + path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  out << dump17(j);
}

}  // namespace qpp::io
