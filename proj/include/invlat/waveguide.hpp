#pragma once

// Bent-waveguide design: corners are sites, the straight pieces between
// them are couplings through Delta(d) = Delta(0) exp(-d / lambda).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"
#include "invlat/tridiagonal.hpp"

namespace invlat {

/// Physical constants of a guide of width L. Energies are k^2 in 1/length^2.
struct GuideParams {
  double width = 1.0;
  /// Evanescence length of a corner mode along an arm.
  double lambda = 1.3;
  /// Coupling prefactor: F(d) = delta0 exp(-d / lambda). The two-corner
  /// splitting is 2 F, so this is half the splitting prefactor.
  double delta0 = 0.215 * 0.93 * std::numbers::pi * std::numbers::pi;
  /// Single-corner bound-state energy.
  double e_b = 0.93 * std::numbers::pi * std::numbers::pi;
  double d_min = 1.0;
  /// Fraction of the sub-threshold window a design may fill.
  double safety = 0.9;

  /// Defaults scaled to width L.
  static GuideParams standard(double width) {
    GuideParams p;
    const double et = std::numbers::pi * std::numbers::pi / (width * width);
    p.width = width;
    p.lambda = 1.3 * width;
    p.e_b = 0.93 * et;
    p.delta0 = 0.215 * p.e_b;
    p.d_min = 1.0 * width;
    return p;
  }

  /// Continuum threshold pi^2 / L^2.
  double e_t() const { return std::numbers::pi * std::numbers::pi / (width * width); }

  void validate() const {
    if (!(width > 0.0) || !(lambda > 0.0) || !(delta0 > 0.0) || !(e_b > 0.0)) {
      throw InvalidInput("guide width, lambda, delta0 and E_b must be positive");
    }
    if (!(d_min >= 0.0)) throw InvalidInput("d_min must be non-negative");
    if (!(safety > 0.0) || safety > 1.0) throw InvalidInput("safety must lie in (0, 1]");
    if (!(e_b < e_t())) throw InvalidInput("E_b must lie below the threshold pi^2 / L^2");
  }
};

/// Largest coupling a segment of length d_min can carry.
inline double coupling_cap(const GuideParams& p) { return p.delta0 * std::exp(-p.d_min / p.lambda); }

/// d_n = lambda ln(delta0 / (s F_n)).
inline std::vector<double> couplings_to_segments(const ChainCouplings& couplings, const GuideParams& params,
                                                 double scale) {
  params.validate();
  if (!(scale > 0.0)) throw InvalidInput("coupling scale must be positive");
  if (couplings.empty()) return {};
  const double max_scale = coupling_cap(params) / couplings.max();
  // a relative slack so that a scale computed as exactly max_scale passes
  if (scale > max_scale * (1.0 + 1e-12)) {
    throw WindowViolation("scaled coupling " + std::to_string(scale * couplings.max()) +
                              " exceeds the cap delta0 exp(-d_min / lambda) = " + std::to_string(coupling_cap(params)),
                          max_scale);
  }
  std::vector<double> d;
  for (double f : couplings.values()) d.push_back(std::max(params.lambda * std::log(params.delta0 / (scale * f)), 0.0));
  return d;
}

/// F_n = delta0 exp(-d_n / lambda) / s.
inline ChainCouplings segments_to_couplings(const std::vector<double>& segments, const GuideParams& params,
                                            double scale) {
  params.validate();
  if (!(scale > 0.0)) throw InvalidInput("coupling scale must be positive");
  std::vector<double> f;
  for (double d : segments) {
    if (!std::isfinite(d)) throw InvalidInput("segment lengths must be finite");
    f.push_back(params.delta0 * std::exp(-d / params.lambda) / scale);
  }
  return ChainCouplings(std::move(f));
}

struct Embedding {
  double scale = 0.0;
  /// E_b + s E_k, ascending.
  std::vector<double> levels;
  /// E_b - safety * half-window and E_b + safety * half-window.
  double lower = 0.0;
  double upper = 0.0;
};

/// Maps the dimensionless target into the window around E_b:
/// s = safety min(E_b, E_t - E_b) / max|E_k|, lowered further when the
/// largest of `couplings` would need a segment shorter than d_min.
inline Embedding embed_spectrum(const SymmetricSpectrum& target, const GuideParams& params,
                                const std::optional<ChainCouplings>& couplings = std::nullopt) {
  params.validate();
  const double rho = target.radius();
  if (!(rho > 0.0)) throw DegenerateTarget("cannot embed a spectrum with max|E| = 0");
  const double half = std::min(params.e_b, params.e_t() - params.e_b);
  Embedding out;
  out.scale = params.safety * half / rho;
  if (couplings && !couplings->empty()) out.scale = std::min(out.scale, coupling_cap(params) / couplings->max());
  for (double e : target.values()) out.levels.push_back(params.e_b + out.scale * e);
  out.lower = params.e_b - params.safety * half;
  out.upper = params.e_b + params.safety * half;
  return out;
}

enum class Turn { Left, Right };

enum class TurnPattern { Zigzag, Meander, Custom };

inline std::string to_string(TurnPattern p) {
  switch (p) {
    case TurnPattern::Zigzag: return "zigzag";
    case TurnPattern::Meander: return "meander";
    case TurnPattern::Custom: return "custom";
  }
  return "?";
}

inline TurnPattern turn_pattern_from_string(const std::string& s) {
  if (s == "zigzag") return TurnPattern::Zigzag;
  if (s == "meander") return TurnPattern::Meander;
  if (s == "custom") return TurnPattern::Custom;
  throw InvalidInput("unknown turn pattern '" + s + "' (expected zigzag, meander or custom)");
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0, x1, y0, y1;
};

/// A right-angle guide: a centre-line polyline from the far end of the
/// first arm, through every corner, to the far end of the last arm.
struct GuideGeometry {
  double width = 1.0;
  double arm_length = 8.0;
  /// Corner-to-corner lengths d_1..d_N.
  std::vector<double> segments;
  /// One turn per corner.
  std::vector<Turn> turns;
  /// arm end, corners 1..N+1, arm end.
  std::vector<Point> vertices;

  std::size_t corners() const { return turns.size(); }

  /// One rectangle per straight piece, width L, extended by L/2 into each
  /// corner so consecutive pieces share the corner square.
  std::vector<Rect> pieces() const {
    std::vector<Rect> out;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
      const Point a = vertices[i];
      const Point b = vertices[i + 1];
      const double ea = i > 0 ? half : 0.0;
      const double eb = i + 2 < vertices.size() ? half : 0.0;
      if (a.y == b.y) {
        const bool fwd = a.x <= b.x;
        const double lo = fwd ? a.x - ea : b.x - eb;
        const double hi = fwd ? b.x + eb : a.x + ea;
        out.push_back({lo, hi, a.y - half, a.y + half});
      } else {
        const bool fwd = a.y <= b.y;
        const double lo = fwd ? a.y - ea : b.y - eb;
        const double hi = fwd ? b.y + eb : a.y + ea;
        out.push_back({a.x - half, a.x + half, lo, hi});
      }
    }
    return out;
  }
};

inline bool rects_overlap(const Rect& a, const Rect& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

/// Throws SelfIntersection for the first pair of non-adjacent pieces whose
/// closed rectangles meet (touching counts: the outline would merge). Pieces
/// two apart may meet inside the piece between them.
inline void validate_geometry(const GuideGeometry& g) {
  const auto r = g.pieces();
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 2; j < r.size(); ++j) {
      if (!rects_overlap(r[i], r[j])) continue;
      if (j == i + 2) {
        const Rect& mid = r[i + 1];
        const Rect meet{std::max(r[i].x0, r[j].x0), std::min(r[i].x1, r[j].x1), std::max(r[i].y0, r[j].y0),
                        std::min(r[i].y1, r[j].y1)};
        if (meet.x0 >= mid.x0 && meet.x1 <= mid.x1 && meet.y0 >= mid.y0 && meet.y1 <= mid.y1) continue;
      }
      throw SelfIntersection("guide pieces " + std::to_string(i) + " and " + std::to_string(j) + " intersect", i, j);
    }
  }
}

/// Walks the centre line: the first arm runs along +x into corner 1, each
/// corner turns by 90 degrees, segments separate the corners, and a final
/// arm leaves the last corner. Not validated.
inline GuideGeometry trace_geometry(const std::vector<double>& segments, const std::vector<Turn>& turns, double width,
                                    double arm_length) {
  if (turns.size() != segments.size() + 1) {
    throw DimensionMismatch("a guide with " + std::to_string(segments.size()) + " segments needs " +
                            std::to_string(segments.size() + 1) + " turns");
  }
  if (!(width > 0.0) || !(arm_length > 0.0)) throw InvalidInput("width and arm length must be positive");
  GuideGeometry g;
  g.width = width;
  g.arm_length = arm_length;
  g.segments = segments;
  g.turns = turns;
  int dx = 1;
  int dy = 0;
  Point at{0.0, 0.0};
  g.vertices.push_back({-arm_length, 0.0});
  g.vertices.push_back(at);
  for (std::size_t c = 0; c < turns.size(); ++c) {
    // left: (dx, dy) -> (-dy, dx)
    const int ndx = turns[c] == Turn::Left ? -dy : dy;
    const int ndy = turns[c] == Turn::Left ? dx : -dx;
    dx = ndx;
    dy = ndy;
    const double len = c < segments.size() ? segments[c] : arm_length;
    at = {at.x + dx * len, at.y + dy * len};
    g.vertices.push_back(at);
  }
  return g;
}

/// A straight strip of the given length without corners.
inline GuideGeometry straight_geometry(double length, double width = 1.0) {
  if (!(length > 0.0) || !(width > 0.0)) throw InvalidInput("strip length and width must be positive");
  GuideGeometry g;
  g.width = width;
  g.arm_length = length;
  g.vertices = {{0.0, 0.0}, {length, 0.0}};
  return g;
}

/// Closed outline of the guide, counter-clockwise for a first arm along +x:
/// the left wall from the first arm end to the last, then the right wall back.
inline std::vector<Point> outline_polygon(const GuideGeometry& g) {
  const std::size_t n = g.vertices.size();
  if (n < 2) throw InvalidInput("geometry has no centre line");
  const double half = 0.5 * g.width;
  auto normal = [&](std::size_t i) {
    const double dx = g.vertices[i + 1].x - g.vertices[i].x;
    const double dy = g.vertices[i + 1].y - g.vertices[i].y;
    const double len = std::hypot(dx, dy);
    return Point{-dy / len, dx / len};
  };
  std::vector<Point> offset(n);
  for (std::size_t i = 0; i < n; ++i) {
    // at a right-angle corner the two wall normals add up to the mitre point
    Point m{0.0, 0.0};
    if (i > 0) {
      const Point a = normal(i - 1);
      m = {m.x + a.x, m.y + a.y};
    }
    if (i + 1 < n) {
      const Point b = normal(i);
      m = {m.x + b.x, m.y + b.y};
    }
    if (i == 0 || i + 1 == n) m = i == 0 ? normal(0) : normal(n - 2);
    offset[i] = {half * m.x, half * m.y};
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({g.vertices[i].x + offset[i].x, g.vertices[i].y + offset[i].y});
  for (std::size_t i = n; i-- > 0;) out.push_back({g.vertices[i].x - offset[i].x, g.vertices[i].y - offset[i].y});
  return out;
}

inline std::vector<Turn> pattern_turns(TurnPattern pattern, std::size_t corners, const std::vector<Turn>& custom = {}) {
  std::vector<Turn> base;
  switch (pattern) {
    case TurnPattern::Zigzag: base = {Turn::Left, Turn::Right}; break;
    case TurnPattern::Meander: base = {Turn::Left, Turn::Left, Turn::Right, Turn::Right}; break;
    case TurnPattern::Custom:
      if (custom.empty()) throw InvalidInput("custom turn pattern is empty");
      base = custom;
      break;
  }
  std::vector<Turn> out;
  for (std::size_t c = 0; c < corners; ++c) out.push_back(base[c % base.size()]);
  return out;
}

/// Lays out `segments` with the turn pattern cycled over the corners and
/// arms of 8 L. A built-in pattern that self-intersects is retried with the
/// other built-in pattern before the error is raised.
inline GuideGeometry layout_geometry(const std::vector<double>& segments, TurnPattern pattern,
                                     const GuideParams& params, const std::vector<Turn>& custom = {}) {
  params.validate();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i] >= params.d_min * (1.0 - 1e-12))) {
      throw InvalidInput("segment " + std::to_string(i + 1) + " = " + std::to_string(segments[i]) +
                         " is shorter than d_min = " + std::to_string(params.d_min));
    }
  }
  const double arm = 8.0 * params.width;
  auto attempt = [&](TurnPattern p) {
    auto g = trace_geometry(segments, pattern_turns(p, segments.size() + 1, custom), params.width, arm);
    validate_geometry(g);
    return g;
  };
  try {
    return attempt(pattern);
  } catch (const SelfIntersection&) {
    if (pattern == TurnPattern::Custom) throw;
    return attempt(pattern == TurnPattern::Zigzag ? TurnPattern::Meander : TurnPattern::Zigzag);
  }
}

/// Tight-binding levels E_b + s eig(F) of a designed guide.
inline std::vector<double> tight_binding_levels(const ChainCouplings& couplings, double e_b, double scale) {
  std::vector<double> out;
  if (couplings.empty()) return {e_b};
  const auto eig = eig_jacobi(couplings);
  for (double e : eig.spectrum.values()) out.push_back(e_b + scale * e);
  return out;
}

}  // namespace invlat
