#pragma once

// Instance files.
//
// native:  "pathtsp 1", then "n s t", then the n(n-1)/2 upper-triangular costs
//          row by row, whitespace separated, each a rational "p/q", integer or decimal.
// TSPLIB:  TYPE TSP with EDGE_WEIGHT_TYPE EUC_2D (nint-rounded distances) or
//          EXPLICIT with EDGE_WEIGHT_FORMAT FULL_MATRIX / UPPER_ROW.
// JSON:    {"n": 3, "s": 0, "t": 2, "costs": ["1", "2", "1"]}; "costs" may also
//          be a full matrix, and {"points": [[x,y], ...]} is read like EUC_2D.
//
// Vertex ids are 0-based everywhere. Without explicit endpoints the TSPLIB and
// point readers use the first and the last node.

#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp::io {

enum class Format { Native, Tsplib, Json };

struct Endpoints {
  std::optional<Vertex> s;
  std::optional<Vertex> t;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline MetricInstance finish(int n, Vertex s, Vertex t, std::vector<Rational> costs, const Endpoints& ep) {
  if (n < 2) throw InputError("instance needs at least 2 vertices, got " + std::to_string(n));
  s = ep.s.value_or(s);
  t = ep.t.value_or(t);
  if (s < 0 || s >= n || t < 0 || t >= n) throw InputError("endpoint out of range 0.." + std::to_string(n - 1));
  if (s == t) throw InputError("s and t must differ (both " + std::to_string(s) + ")");
  return MetricInstance(n, s, t, std::move(costs));
}

/// TSPLIB nint: round half up.
inline long nint(double v) { return static_cast<long>(std::floor(v + 0.5)); }

inline std::vector<Rational> euclidean_costs(const std::vector<std::pair<double, double>>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<Rational> costs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double dx = pts[u].first - pts[v].first, dy = pts[u].second - pts[v].second;
      costs.emplace_back(nint(std::sqrt(dx * dx + dy * dy)));
    }
  // Rounding can break the triangle inequality by one unit; close the metric.
  return metric_closure(n, costs);
}

/// Reads whitespace-separated tokens with their line numbers.
class Tokens {
 public:
  explicit Tokens(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) items_.push_back({tok, no});
    }
  }
  bool done() const { return pos_ >= items_.size(); }
  const std::string& next(const char* what) {
    if (done()) throw InputError(std::string("unexpected end of input, expected ") + what);
    return items_[pos_++].first;
  }
  int line() const { return items_[pos_ == 0 ? 0 : pos_ - 1].second; }

 private:
  std::vector<std::pair<std::string, int>> items_;
  std::size_t pos_ = 0;
};

inline long parse_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw InputError("line " + std::to_string(line) + ": expected an integer, got '" + tok + "'");
  return v;
}

inline double parse_real(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw InputError("line " + std::to_string(line) + ": expected a number, got '" + tok + "'");
  return v;
}

inline void require_metric(const MetricInstance& inst) {
  const auto bad = validate_metric(inst);
  if (!bad.empty()) throw InputError("instance is not metric: " + bad.front().message);
}

}  // namespace detail

inline MetricInstance parse_native(const std::string& text, const Endpoints& ep = {}) {
  detail::Tokens tok(text);
  const std::string magic = tok.next("header");
  const std::string version = tok.next("header version");
  if (magic != "pathtsp" || version != "1") throw InputError("line 1: expected header 'pathtsp 1'");
  const long n = detail::parse_int(tok.next("n"), tok.line());
  const long s = detail::parse_int(tok.next("s"), tok.line());
  const long t = detail::parse_int(tok.next("t"), tok.line());
  if (n < 2) throw InputError("line " + std::to_string(tok.line()) + ": n must be at least 2");
  if (n > kMaxVertices) throw ResourceError("n = " + std::to_string(n) + " exceeds the limit " + std::to_string(kMaxVertices));
  std::vector<Rational> costs;
  for (long i = 0; i < n * (n - 1) / 2; ++i) {
    const std::string& c = tok.next("cost");
    try {
      costs.push_back(parse_rational(c));
    } catch (const InputError& err) {
      throw InputError("line " + std::to_string(tok.line()) + ": " + err.what());
    }
  }
  if (!tok.done()) throw InputError("line " + std::to_string(tok.line()) + ": trailing data after the cost table");
  return detail::finish(static_cast<int>(n), static_cast<Vertex>(s), static_cast<Vertex>(t), std::move(costs), ep);
}

inline std::string write_native(const MetricInstance& inst) {
  std::ostringstream out;
  out << "pathtsp 1\n" << inst.size() << ' ' << inst.source() << ' ' << inst.sink() << '\n';
  for (Vertex u = 0; u < inst.size(); ++u) {
    bool first = true;
    for (Vertex v = u + 1; v < inst.size(); ++v) {
      out << (first ? "" : " ") << to_string(inst.cost(u, v));
      first = false;
    }
    if (!first) out << '\n';
  }
  return out.str();
}

inline MetricInstance parse_tsplib(const std::string& text, const Endpoints& ep = {}) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  long dim = -1;
  std::string weight_type, weight_format, type = "TSP";
  std::vector<std::pair<double, double>> pts;
  std::vector<Rational> weights;

  auto section_numbers = [&](std::size_t want, auto&& sink) {
    while (want > 0 && std::getline(in, line)) {
      ++no;
      std::istringstream ls(line);
      std::string tok;
      while (want > 0 && ls >> tok) {
        if (detail::upper(tok) == "EOF") throw InputError("line " + std::to_string(no) + ": section ends early");
        sink(tok);
        --want;
      }
    }
    if (want > 0) throw InputError("line " + std::to_string(no) + ": section ends early");
  };

  while (std::getline(in, line)) {
    ++no;
    const std::string l = detail::trim(line);
    if (l.empty()) continue;
    const std::string key = detail::upper(detail::trim(l.substr(0, l.find(':'))));
    const std::string value = l.find(':') == std::string::npos ? "" : detail::trim(l.substr(l.find(':') + 1));
    if (key == "EOF") break;
    if (key == "NAME" || key == "COMMENT") continue;
    if (key == "TYPE") {
      type = detail::upper(value);
      if (type != "TSP") throw InputError("line " + std::to_string(no) + ": unsupported TYPE " + value);
    } else if (key == "DIMENSION") {
      dim = detail::parse_int(value, no);
      if (dim < 2) throw InputError("line " + std::to_string(no) + ": DIMENSION must be at least 2");
      if (dim > kMaxVertices) throw ResourceError("DIMENSION " + std::to_string(dim) + " exceeds the limit " + std::to_string(kMaxVertices));
    } else if (key == "EDGE_WEIGHT_TYPE") {
      weight_type = detail::upper(value);
      if (weight_type != "EUC_2D" && weight_type != "EXPLICIT") throw InputError("line " + std::to_string(no) + ": unsupported EDGE_WEIGHT_TYPE " + value);
    } else if (key == "EDGE_WEIGHT_FORMAT") {
      weight_format = detail::upper(value);
      if (weight_format != "FULL_MATRIX" && weight_format != "UPPER_ROW")
        throw InputError("line " + std::to_string(no) + ": unsupported EDGE_WEIGHT_FORMAT " + value);
    } else if (key == "NODE_COORD_SECTION") {
      if (dim < 0) throw InputError("line " + std::to_string(no) + ": NODE_COORD_SECTION before DIMENSION");
      pts.assign(dim, {0.0, 0.0});
      std::vector<bool> seen(dim, false);
      for (long i = 0; i < dim; ++i) {
        if (!std::getline(in, line)) throw InputError("line " + std::to_string(no) + ": NODE_COORD_SECTION ends early");
        ++no;
        std::istringstream ls(line);
        std::string id, x, y;
        if (!(ls >> id >> x >> y)) throw InputError("line " + std::to_string(no) + ": expected 'id x y'");
        const long k = detail::parse_int(id, no);
        if (k < 1 || k > dim || seen[k - 1]) throw InputError("line " + std::to_string(no) + ": bad node id " + id);
        seen[k - 1] = true;
        pts[k - 1] = {detail::parse_real(x, no), detail::parse_real(y, no)};
      }
    } else if (key == "EDGE_WEIGHT_SECTION") {
      if (dim < 0) throw InputError("line " + std::to_string(no) + ": EDGE_WEIGHT_SECTION before DIMENSION");
      const std::size_t want = weight_format == "UPPER_ROW" ? dim * (dim - 1) / 2 : dim * dim;
      section_numbers(want, [&](const std::string& tok) {
        try {
          weights.push_back(parse_rational(tok));
        } catch (const InputError&) {
          throw InputError("line " + std::to_string(no) + ": expected a number, got '" + tok + "'");
        }
      });
    } else if (key == "DISPLAY_DATA_TYPE" || key == "DISPLAY_DATA_SECTION") {
      continue;
    } else {
      throw InputError("line " + std::to_string(no) + ": unknown keyword " + key);
    }
  }
  if (dim < 0) throw InputError("missing DIMENSION");
  const int n = static_cast<int>(dim);
  std::vector<Rational> costs;
  if (weight_type == "EUC_2D") {
    if (pts.empty()) throw InputError("missing NODE_COORD_SECTION");
    costs = detail::euclidean_costs(pts);
  } else if (weight_type == "EXPLICIT") {
    if (weights.empty()) throw InputError("missing EDGE_WEIGHT_SECTION");
    if (weight_format == "UPPER_ROW") {
      costs = weights;
    } else {
      if (weight_format.empty()) throw InputError("EXPLICIT weights need EDGE_WEIGHT_FORMAT");
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          if (weights[u * n + v] != weights[v * n + u]) throw InputError("FULL_MATRIX is not symmetric at (" + std::to_string(u + 1) + "," + std::to_string(v + 1) + ")");
          costs.push_back(weights[u * n + v]);
        }
    }
  } else {
    throw InputError("missing EDGE_WEIGHT_TYPE");
  }
  MetricInstance inst = detail::finish(n, 0, n - 1, std::move(costs), ep);
  detail::require_metric(inst);
  return inst;
}

inline MetricInstance parse_json(const std::string& text, const Endpoints& ep = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw InputError(std::string("JSON syntax error: ") + err.what());
  }
  if (!j.is_object()) throw InputError("JSON instance must be an object");
  auto as_rational = [](const nlohmann::json& v) -> Rational {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(mpz_class(std::to_string(v.get<long long>())));
    if (v.is_number()) return parse_rational(v.dump());
    throw InputError("cost entries must be numbers or rational strings");
  };
  try {
    if (j.contains("points")) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      const int n = static_cast<int>(pts.size());
      if (n < 2) throw InputError("instance needs at least 2 vertices");
      if (n > kMaxVertices) throw ResourceError("too many points");
      return detail::finish(n, j.value("s", 0), j.value("t", n - 1), detail::euclidean_costs(pts), ep);
    }
    const int n = j.at("n").get<int>();
    if (n < 2) throw InputError("instance needs at least 2 vertices, got " + std::to_string(n));
    if (n > kMaxVertices) throw ResourceError("n = " + std::to_string(n) + " exceeds the limit");
    const auto& c = j.at("costs");
    std::vector<Rational> costs;
    if (!c.empty() && c.at(0).is_array()) {
      if (static_cast<int>(c.size()) != n) throw InputError("cost matrix must have n rows");
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          const Rational a = as_rational(c.at(u).at(v)), b = as_rational(c.at(v).at(u));
          if (a != b) throw InputError("cost matrix is not symmetric at (" + std::to_string(u) + "," + std::to_string(v) + ")");
          costs.push_back(a);
        }
    } else {
      for (const auto& v : c) costs.push_back(as_rational(v));
    }
    return detail::finish(n, j.value("s", 0), j.value("t", n - 1), std::move(costs), ep);
  } catch (const nlohmann::json::exception& err) {
    throw InputError(std::string("JSON instance: ") + err.what());
  }
}

inline std::string write_json(const MetricInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.size();
  j["s"] = inst.source();
  j["t"] = inst.sink();
  std::vector<std::string> costs;
  for (const Rational& c : inst.costs()) costs.push_back(to_string(c));
  j["costs"] = costs;
  return j.dump(1) + "\n";
}

inline Format detect_format(const std::string& text) {
  const std::string t = detail::trim(text);
  if (!t.empty() && t[0] == '{') return Format::Json;
  if (t.rfind("pathtsp", 0) == 0) return Format::Native;
  return Format::Tsplib;
}

/// Parses any supported format and rejects non-metric data.
inline MetricInstance parse_instance(const std::string& text, std::optional<Format> format = std::nullopt, const Endpoints& ep = {}) {
  const Format f = format.value_or(detect_format(text));
  MetricInstance inst;
  switch (f) {
    case Format::Native: inst = parse_native(text, ep); break;
    case Format::Tsplib: inst = parse_tsplib(text, ep); break;
    case Format::Json: inst = parse_json(text, ep); break;
  }
  detail::require_metric(inst);
  return inst;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

inline MetricInstance load_instance(const std::string& path, const Endpoints& ep = {}) { return parse_instance(read_file(path), std::nullopt, ep); }

}  // namespace pathtsp::io
