#pragma once

// CSV, JSON and SVG artifacts. Numbers are written with 17 significant
// digits so every double reads back bit-identical.

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "invlat/ensemble.hpp"
#include "invlat/error.hpp"
#include "invlat/helmholtz.hpp"
#include "invlat/raster.hpp"
#include "invlat/waveguide.hpp"

namespace invlat {

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw InvalidInput(where + ": '" + t + "' is not a number");
  return v;
}

}  // namespace detail

/// Single-column CSV: a header line, then one value per row.
inline void write_column_csv(std::ostream& os, const std::string& header, std::span<const double> values) {
  os << header << '\n';
  for (double v : values) os << format_double(v) << '\n';
}

/// Reads a single-column CSV whose header must equal `header`. Blank lines
/// are skipped.
inline std::vector<double> read_column_csv(std::istream& is, const std::string& header) {
  std::string line;
  std::size_t n = 0;
  bool seen_header = false;
  std::vector<double> out;
  while (std::getline(is, line)) {
    ++n;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (!seen_header) {
      if (t != header) throw InvalidInput("line " + std::to_string(n) + ": expected header '" + header + "', got '" + t + "'");
      seen_header = true;
      continue;
    }
    out.push_back(detail::parse_double(t, "line " + std::to_string(n)));
  }
  if (!seen_header) throw InvalidInput("empty CSV, expected header '" + header + "'");
  return out;
}

inline void write_couplings_csv(std::ostream& os, const ChainCouplings& f) { write_column_csv(os, "F", f.values()); }
inline void write_spectrum_csv(std::ostream& os, const SymmetricSpectrum& s) { write_column_csv(os, "E", s.values()); }
inline ChainCouplings read_couplings_csv(std::istream& is) { return ChainCouplings(read_column_csv(is, "F")); }
inline SymmetricSpectrum read_spectrum_csv(std::istream& is) { return SymmetricSpectrum(read_column_csv(is, "E")); }

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  }
}

using StatRows = std::vector<std::pair<std::string, double>>;

inline void write_stats_csv(std::ostream& os, const StatRows& rows) {
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << k << ',' << format_double(v) << '\n';
}

/// One row per sample: `sample,F1,...,FN`.
inline void write_samples_csv(std::ostream& os, const std::vector<ChainCouplings>& samples) {
  const std::size_t n = samples.empty() ? 0 : samples.front().size();
  os << "sample";
  for (std::size_t i = 1; i <= n; ++i) os << ",F" << i;
  os << '\n';
  for (std::size_t s = 0; s < samples.size(); ++s) {
    os << s;
    for (double v : samples[s].values()) os << ',' << format_double(v);
    os << '\n';
  }
}

/// `d,E_sym,E_antisym,F`, with E_sym the level that is even under the
/// pair's symmetry.
inline void write_sweep_csv(std::ostream& os, const std::vector<Splitting>& sweep) {
  os << "d,E_sym,E_antisym,F\n";
  for (const auto& s : sweep) {
    const bool lower_even = s.lower_parity >= 0;
    os << format_double(s.separation) << ',' << format_double(lower_even ? s.e_lower : s.e_upper) << ','
       << format_double(lower_even ? s.e_upper : s.e_lower) << ',' << format_double(s.coupling) << '\n';
  }
}

/// `k,E` or, with a tight-binding comparison, `k,E,predicted,deviation`.
inline void write_levels_csv(std::ostream& os, const GuideSpectrum& g) {
  const bool compare = !g.predicted.empty();
  os << (compare ? "k,E,predicted,deviation\n" : "k,E\n");
  for (std::size_t i = 0; i < g.levels.size(); ++i) {
    os << i << ',' << format_double(g.levels[i]);
    if (compare) {
      if (i < g.predicted.size()) {
        os << ',' << format_double(g.predicted[i]) << ',' << format_double(g.deviation[i]);
      } else {
        os << ",,";
      }
    }
    os << '\n';
  }
}

/// Mode field as a point cloud `x,y,value` over the interior nodes.
inline void write_mode_csv(std::ostream& os, const GridDomain& d, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != d.unknowns()) throw DimensionMismatch("mode length differs from the domain");
  os << "x,y,value\n";
  for (std::size_t k = 0; k < d.unknowns(); ++k) {
    const auto [r, c] = d.nodes[k];
    os << format_double(d.x(c)) << ',' << format_double(d.y(r)) << ',' << format_double(v(static_cast<Eigen::Index>(k)))
       << '\n';
  }
}

/// The binary mask followed by one little-endian f64 per interior node in
/// row-major order.
inline void write_mode_binary(std::ostream& os, const GridDomain& d, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != d.unknowns()) throw DimensionMismatch("mode length differs from the domain");
  write_mask_binary(os, d);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::uint64_t bits = 0;
    const double x = v(k);
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((bits >> (8 * i)) & 0xFFU));
  }
}

inline std::string to_string(Turn t) { return t == Turn::Left ? "L" : "R"; }

inline Turn turn_from_string(const std::string& s) {
  if (s == "L" || s == "l") return Turn::Left;
  if (s == "R" || s == "r") return Turn::Right;
  throw InvalidInput("turn must be L or R, got '" + s + "'");
}

inline nlohmann::json geometry_to_json(const GuideGeometry& g) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["width"] = g.width;
  j["arms"] = g.arm_length;
  j["segments"] = g.segments;
  std::vector<std::string> turns;
  for (Turn t : g.turns) turns.push_back(to_string(t));
  j["turns"] = turns;
  nlohmann::json v = nlohmann::json::array();
  for (const auto& p : g.vertices) v.push_back({p.x, p.y});
  j["vertices"] = v;
  return j;
}

/// Rebuilds the geometry from segments and turns, checks the stored
/// vertices against it and re-validates.
inline GuideGeometry geometry_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InvalidInput("unsupported geometry schema_version");
    std::vector<Turn> turns;
    for (const auto& t : j.at("turns")) turns.push_back(turn_from_string(t.get<std::string>()));
    const auto segments = j.at("segments").get<std::vector<double>>();
    GuideGeometry g = turns.empty() ? straight_geometry(j.at("arms").get<double>(), j.at("width").get<double>())
                                    : trace_geometry(segments, turns, j.at("width").get<double>(), j.at("arms").get<double>());
    const auto& v = j.at("vertices");
    if (v.size() != g.vertices.size()) throw InvalidInput("geometry vertices do not match segments and turns");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point p{v[i].at(0).get<double>(), v[i].at(1).get<double>()};
      if (std::abs(p.x - g.vertices[i].x) > 1e-9 * g.width || std::abs(p.y - g.vertices[i].y) > 1e-9 * g.width) {
        throw InvalidInput("geometry vertex " + std::to_string(i) + " does not match segments and turns");
      }
      g.vertices[i] = p;
    }
    validate_geometry(g);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed geometry JSON: ") + e.what());
  }
}

inline GuideGeometry read_geometry_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed geometry JSON: ") + e.what());
  }
  return geometry_from_json(j);
}

/// Filled outline, 1 user unit = 1 length unit, y pointing up.
inline void write_geometry_svg(std::ostream& os, const GuideGeometry& g) {
  const auto poly = outline_polygon(g);
  double x0 = poly.front().x, x1 = x0, y0 = poly.front().y, y1 = y0;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double pad = 0.5 * g.width;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(x0 - pad) << ' '
     << format_double(-(y1 + pad)) << ' ' << format_double(x1 - x0 + 2 * pad) << ' ' << format_double(y1 - y0 + 2 * pad)
     << "\">\n";
  os << "<path transform=\"scale(1,-1)\" fill=\"black\" stroke=\"none\" d=\"";
  for (std::size_t i = 0; i < poly.size(); ++i) {
    os << (i == 0 ? "M " : " L ") << format_double(poly[i].x) << ' ' << format_double(poly[i].y);
  }
  os << " Z\"/>\n</svg>\n";
}

/// Outline points of an SVG written by write_geometry_svg.
inline std::vector<Point> read_svg_outline(std::istream& is) {
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  const auto at = text.find(" d=\"");
  if (at == std::string::npos) throw InvalidInput("SVG has no path data");
  const auto end = text.find('"', at + 4);
  std::istringstream path(text.substr(at + 4, end - at - 4));
  std::vector<Point> out;
  std::string cmd;
  while (path >> cmd && cmd != "Z") {
    if (cmd != "M" && cmd != "L") throw InvalidInput("unexpected SVG path command '" + cmd + "'");
    std::string xs, ys;
    path >> xs >> ys;
    out.push_back({detail::parse_double(xs, "SVG x"), detail::parse_double(ys, "SVG y")});
  }
  return out;
}

/// Writes `text` to `path`, surfacing the OS error on failure.
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing: " + std::strerror(errno));
  os << text;
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open " + path + ": " + std::strerror(errno));
  return is;
}

}  // namespace invlat
