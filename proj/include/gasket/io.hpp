#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "gasket/graphfn.hpp"
#include "gasket/linefn.hpp"
#include "gasket/verify.hpp"

namespace gasket {

// All file formats carry {"format": 1}. Values are serialized as strings:
// "p/q" in rational mode (bit-exact round trip), shortest-round-trip decimals
// in floating mode.

template <class S>
constexpr const char* mode_name() {
  return is_exact_v<S> ? "rational" : "floating";
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot open " + tmp.string() + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

template <class S>
json to_json(const LineFunction<S>& f) {
  json values = json::array();
  for (const S& v : f.samples) values.push_back(format_scalar(v));
  return json{{"format", 1},
              {"kind", "line_function"},
              {"mode", mode_name<S>()},
              {"level", f.level},
              {"values", values}};
}

template <class S>
LineFunction<S> line_from_json(const json& j) {
  if (!j.is_object() || j.value("kind", "") != "line_function")
    throw ParseError("not a line_function document");
  if (j.value("format", 0) != 1) throw ParseError("unsupported format version");
  int level = j.at("level").get<int>();
  std::vector<S> samples;
  for (const auto& v : j.at("values")) samples.push_back(parse_scalar<S>(v.get<std::string>()));
  if (samples.size() != (size_t(1) << level) + 1)
    throw ParseError("line_function value count does not match level");
  return LineFunction<S>(level, std::move(samples));
}

template <class S>
json to_json(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  json values = json::object();
  for (Mesh::Index i = 0; i < Mesh::Index(u.values.size()); ++i)
    values[mesh.id_of(i).str()] = format_scalar(u.values[i]);
  return json{{"format", 1},
              {"kind", "graph_function"},
              {"mode", mode_name<S>()},
              {"level", u.level},
              {"values", values}};
}

template <class S>
GraphFunction<S> graph_from_json(const json& j) {
  if (!j.is_object() || j.value("kind", "") != "graph_function")
    throw ParseError("not a graph_function document");
  if (j.value("format", 0) != 1) throw ParseError("unsupported format version");
  int level = j.at("level").get<int>();
  const Mesh& mesh = Mesh::at_least(level);
  auto u = GraphFunction<S>::zero(level);
  const auto& values = j.at("values");
  if (Mesh::Index(values.size()) != mesh.vertex_count(level))
    throw ParseError("graph_function value count does not match level");
  for (auto it = values.begin(); it != values.end(); ++it)
    u.values[mesh.index_of(parse_vertex(it.key()))] =
        parse_scalar<S>(it.value().template get<std::string>());
  return u;
}

inline std::string file_mode(const json& j) { return j.value("mode", "rational"); }

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

// Trace CSV: one row per dyadic point, value in the file's scalar mode.
template <class S>
std::string trace_csv(const LineFunction<S>& f) {
  std::ostringstream out;
  out << "t,value\n";
  for (uint64_t k = 0; k < f.count(); ++k) {
    if constexpr (is_exact_v<S>)
      out << format_scalar(Rational(k, uint64_t(1) << f.level));
    else
      out << format_scalar(double(k) / double(uint64_t(1) << f.level));
    out << "," << format_scalar(f.samples[k]) << "\n";
  }
  return out.str();
}

inline json to_json(const NormReport& r) {
  json levels = json::array(), terms = json::array(), partials = json::array();
  for (size_t i = 0; i < r.terms.size(); ++i) {
    levels.push_back(r.levels[i]);
    terms.push_back(r.terms[i]);
    partials.push_back(r.partials[i]);
  }
  return json{{"format", 1},
              {"kind", "norm_report"},
              {"space", norm_space_name(r.space)},
              {"parameter", r.parameter},
              {"value", r.value},
              {"base_term", r.base_term},
              {"levels", levels},
              {"terms", terms},
              {"partials", partials},
              {"truncation_level", r.truncation_level}};
}

inline std::string norm_csv(const NormReport& r) {
  std::ostringstream out;
  out << "level,value,ratio\n";
  for (size_t i = 0; i < r.terms.size(); ++i) {
    double ratio = (i > 0 && r.terms[i - 1] != 0.0) ? r.terms[i] / r.terms[i - 1] : 0.0;
    out << r.levels[i] << "," << format_scalar(r.terms[i]) << "," << format_scalar(ratio)
        << "\n";
  }
  return out.str();
}

// Minimal SVG polyline of a per-level series on a log10 value scale.
inline std::string series_svg(const Series& s) {
  const double W = 640, H = 360, pad = 40;
  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& p : s.points) {
    if (p.value <= 0) continue;
    double v = std::log10(p.value);
    if (first) lo = hi = v, first = false;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) hi = lo + 1;
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n<polyline fill='none' "
         "stroke='steelblue' stroke-width='1.5' points='";
  int n = int(s.points.size());
  for (int i = 0; i < n; ++i) {
    const auto& p = s.points[i];
    double x = pad + (W - 2 * pad) * (n > 1 ? double(i) / (n - 1) : 0.5);
    double v = p.value > 0 ? std::log10(p.value) : lo;
    double y = H - pad - (H - 2 * pad) * (v - lo) / (hi - lo);
    out << x << "," << y << " ";
  }
  out << "'/>\n<text x='" << pad << "' y='" << H - 8 << "' font-size='12'>" << s.name
      << " (log10 scale)</text>\n</svg>\n";
  return out.str();
}

}  // namespace gasket
