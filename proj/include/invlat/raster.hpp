#pragma once

// Guide outlines on a square lattice of spacing h = L / m.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "invlat/error.hpp"
#include "invlat/waveguide.hpp"

namespace invlat {

/// Interior nodes of a Dirichlet domain. Node (r, c) sits at
/// (x0 + c h, y0 + r h); boundary nodes are never interior.
struct GridDomain {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double h = 0.0;
  double width = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  /// Row-major, 1 for interior.
  std::vector<std::uint8_t> mask;
  /// Row-major unknown index, -1 outside.
  std::vector<long> index;
  /// Unknown k -> (row, col).
  std::vector<std::pair<std::size_t, std::size_t>> nodes;

  bool inside(std::size_t r, std::size_t c) const { return mask[r * cols + c] != 0; }
  std::size_t unknowns() const { return nodes.size(); }
  double x(std::size_t c) const { return x0 + static_cast<double>(c) * h; }
  double y(std::size_t r) const { return y0 + static_cast<double>(r) * h; }

  /// Fills `index` and `nodes` from `mask`.
  void build_index() {
    index.assign(mask.size(), -1);
    nodes.clear();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (inside(r, c)) {
          index[r * cols + c] = static_cast<long>(nodes.size());
          nodes.emplace_back(r, c);
        }
      }
    }
  }
};

/// m = L / h, which must be an integer >= 8.
inline long cells_per_width(double width, double h) {
  if (!(h > 0.0) || !(width > 0.0)) throw InvalidInput("grid spacing and width must be positive");
  const double ratio = width / h;
  const long m = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio) {
    throw InvalidInput("grid spacing must divide the width (L / h = " + std::to_string(ratio) + ")");
  }
  if (m < 8) throw ResolutionTooCoarse("need at least 8 cells across the guide, got " + std::to_string(m));
  return m;
}

/// Throws DisconnectedDomain unless the interior nodes form one 4-connected
/// component.
inline void check_connected(const GridDomain& d) {
  if (d.nodes.empty()) throw InvalidInput("domain has no interior nodes");
  std::vector<std::uint8_t> seen(d.mask.size(), 0);
  std::queue<std::pair<std::size_t, std::size_t>> todo;
  todo.push(d.nodes.front());
  seen[d.nodes.front().first * d.cols + d.nodes.front().second] = 1;
  std::size_t reached = 0;
  while (!todo.empty()) {
    const auto [r, c] = todo.front();
    todo.pop();
    ++reached;
    const std::pair<long, long> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& [dr, dc] : steps) {
      const long rr = static_cast<long>(r) + dr;
      const long cc = static_cast<long>(c) + dc;
      if (rr < 0 || cc < 0 || rr >= static_cast<long>(d.rows) || cc >= static_cast<long>(d.cols)) continue;
      const auto k = static_cast<std::size_t>(rr) * d.cols + static_cast<std::size_t>(cc);
      if (d.mask[k] && !seen[k]) {
        seen[k] = 1;
        todo.emplace(rr, cc);
      }
    }
  }
  if (reached != d.nodes.size()) {
    throw DisconnectedDomain("interior nodes form more than one component (" + std::to_string(reached) + " of " +
                             std::to_string(d.nodes.size()) + " reachable)");
  }
}

/// Rasterises the union of `rects`. Vertices and edges are snapped to the
/// lattice: centre lines to multiples of h, so the guide walls (at +-L/2)
/// fall on node lines for either parity of m. A node is interior when the
/// four cells around it are covered.
inline GridDomain rasterize_rects(const std::vector<Rect>& rects, double width, double h) {
  if (rects.empty()) throw InvalidInput("cannot rasterise an empty geometry");
  const long m = cells_per_width(width, h);
  // work in half-steps u = h / 2 so every edge is an integer
  const double u = 0.5 * h;
  struct IRect {
    long x0, x1, y0, y1;
  };
  auto snap_edge = [&](double v, double centre_offset) {
    // edge = snapped centre line +- m half-steps
    return 2 * std::lround((v - centre_offset) / h) + (centre_offset > 0 ? m : -m);
  };
  std::vector<IRect> ir;
  const double half = 0.5 * width;
  for (const auto& r : rects) {
    ir.push_back({snap_edge(r.x0, -half), snap_edge(r.x1, half), snap_edge(r.y0, -half), snap_edge(r.y1, half)});
  }
  long xmin = ir.front().x0, xmax = ir.front().x1, ymin = ir.front().y0, ymax = ir.front().y1;
  for (const auto& r : ir) {
    xmin = std::min(xmin, r.x0);
    xmax = std::max(xmax, r.x1);
    ymin = std::min(ymin, r.y0);
    ymax = std::max(ymax, r.y1);
  }
  GridDomain d;
  d.h = h;
  d.width = width;
  d.cols = static_cast<std::size_t>((xmax - xmin) / 2) + 1;
  d.rows = static_cast<std::size_t>((ymax - ymin) / 2) + 1;
  d.x0 = static_cast<double>(xmin) * u;
  d.y0 = static_cast<double>(ymin) * u;

  // cell (r, c) spans nodes r..r+1, c..c+1; its centre is odd in half-steps
  const std::size_t crow = d.rows - 1;
  const std::size_t ccol = d.cols - 1;
  std::vector<std::uint8_t> cell(crow * ccol, 0);
  for (const auto& r : ir) {
    const auto c0 = static_cast<std::size_t>((r.x0 - xmin) / 2);
    const auto c1 = static_cast<std::size_t>((r.x1 - xmin) / 2);
    const auto r0 = static_cast<std::size_t>((r.y0 - ymin) / 2);
    const auto r1 = static_cast<std::size_t>((r.y1 - ymin) / 2);
    for (std::size_t rr = r0; rr < r1; ++rr) {
      for (std::size_t cc = c0; cc < c1; ++cc) cell[rr * ccol + cc] = 1;
    }
  }
  d.mask.assign(d.rows * d.cols, 0);
  for (std::size_t r = 1; r + 1 < d.rows; ++r) {
    for (std::size_t c = 1; c + 1 < d.cols; ++c) {
      d.mask[r * d.cols + c] = cell[(r - 1) * ccol + c - 1] & cell[(r - 1) * ccol + c] & cell[r * ccol + c - 1] &
                               cell[r * ccol + c];
    }
  }
  d.build_index();
  check_connected(d);
  return d;
}

inline GridDomain rasterize_mask(const GuideGeometry& geometry, double h) {
  if (geometry.vertices.size() < 2) throw InvalidInput("cannot rasterise an empty geometry");
  return rasterize_rects(geometry.pieces(), geometry.width, h);
}

/// `#` interior, `.` exterior; top row printed first.
inline void write_mask_text(std::ostream& os, const GridDomain& d) {
  for (std::size_t r = d.rows; r-- > 0;) {
    for (std::size_t c = 0; c < d.cols; ++c) os << (d.inside(r, c) ? '#' : '.');
    os << '\n';
  }
}

namespace detail {
inline void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFFU));
}
inline std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int ch = is.get();
    if (ch == std::char_traits<char>::eof()) throw InvalidInput("truncated mask header");
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(ch)) << (8 * i);
  }
  return v;
}
}  // namespace detail

/// `LFMASK01`, u32 rows, u32 cols (little-endian), then the row-major mask
/// packed 8 nodes per byte, least significant bit first.
inline void write_mask_binary(std::ostream& os, const GridDomain& d) {
  os.write("LFMASK01", 8);
  detail::put_u32(os, static_cast<std::uint32_t>(d.rows));
  detail::put_u32(os, static_cast<std::uint32_t>(d.cols));
  std::uint8_t byte = 0;
  int bit = 0;
  for (std::uint8_t v : d.mask) {
    if (v) byte = static_cast<std::uint8_t>(byte | (1U << bit));
    if (++bit == 8) {
      os.put(static_cast<char>(byte));
      byte = 0;
      bit = 0;
    }
  }
  if (bit > 0) os.put(static_cast<char>(byte));
}

/// Reads a binary mask; h, width and origin are not stored and stay default.
inline GridDomain read_mask_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::string(magic, 8) != "LFMASK01") throw InvalidInput("not an LFMASK01 stream");
  GridDomain d;
  d.rows = detail::get_u32(is);
  d.cols = detail::get_u32(is);
  d.mask.assign(d.rows * d.cols, 0);
  std::size_t i = 0;
  while (i < d.mask.size()) {
    const int ch = is.get();
    if (ch == std::char_traits<char>::eof()) throw InvalidInput("truncated mask body");
    for (int bit = 0; bit < 8 && i < d.mask.size(); ++bit, ++i) d.mask[i] = (ch >> bit) & 1;
  }
  d.build_index();
  return d;
}

}  // namespace invlat
