#pragma once

// Dirichlet Helmholtz problem -lap(phi) = k^2 phi on rasterised guides:
// 5-point Laplacian, sub-threshold modes by shift-invert Lanczos, and the
// corner and two-corner studies built on it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "invlat/error.hpp"
#include "invlat/fit.hpp"
#include "invlat/raster.hpp"
#include "invlat/rng.hpp"
#include "invlat/tridiagonal.hpp"
#include "invlat/waveguide.hpp"

namespace invlat {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SparseOperator {
  SparseMatrix matrix;
  double h = 0.0;
};

/// -lap with 4/h^2 on the diagonal and -1/h^2 between adjacent interior
/// nodes.
inline SparseOperator assemble_laplacian(const GridDomain& domain) {
  if (domain.unknowns() == 0) throw InvalidInput("domain has no interior nodes");
  check_connected(domain);
  const double inv = 1.0 / (domain.h * domain.h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(domain.unknowns() * 5);
  for (std::size_t k = 0; k < domain.unknowns(); ++k) {
    const auto [r, c] = domain.nodes[k];
    const auto row = static_cast<Eigen::Index>(k);
    t.emplace_back(row, row, 4.0 * inv);
    auto link = [&](std::size_t rr, std::size_t cc) {
      const long j = domain.index[rr * domain.cols + cc];
      if (j >= 0) t.emplace_back(row, static_cast<Eigen::Index>(j), -inv);
    };
    if (r > 0) link(r - 1, c);
    if (r + 1 < domain.rows) link(r + 1, c);
    if (c > 0) link(r, c - 1);
    if (c + 1 < domain.cols) link(r, c + 1);
  }
  const auto n = static_cast<Eigen::Index>(domain.unknowns());
  SparseOperator op;
  op.h = domain.h;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  return op;
}

/// Lowest transverse level of a strip of width L on the same grid,
/// (2 / h^2)(1 - cos(pi h / L)).
inline double discrete_threshold(double h, double width) {
  return 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h / width));
}

/// Number of eigenvalues of `a` below `sigma`, from the signs of the LDL^T
/// pivots of a - sigma (Sylvester's law of inertia).
inline std::size_t count_below(const SparseMatrix& a, double sigma) {
  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw ConvergenceFailure("LDL^T factorisation failed at shift " + std::to_string(sigma), {});
  std::size_t neg = 0;
  const auto& d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) < 0.0) ++neg;
    if (d(i) == 0.0) throw ConvergenceFailure("shift " + std::to_string(sigma) + " is an eigenvalue", {});
  }
  return neg;
}

struct ModeRequest {
  /// All modes with k^2 below this value...
  std::optional<double> threshold;
  /// ...or the lowest `count`.
  std::size_t count = 0;
};

struct ModeResult {
  std::vector<double> values;
  /// Column j pairs with values[j]; h^2 sum v^2 = 1, largest entry positive.
  Eigen::MatrixXd vectors;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::size_t count_below = 0;
  std::vector<double> residuals;
};

namespace detail {

// Lanczos on (A - sigma)^{-1} with full reorthogonalisation, extended until
// the `want` largest Ritz pairs satisfy |A y - lambda y| <= tol lambda.
inline ModeResult shift_invert_lanczos(const SparseMatrix& a, double sigma, std::size_t want, double h, double tol) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("shift-invert factorisation failed", {});

  Rng rng = make_stream(kDefaultSeed, "lanczos.start");
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = uniform(rng, -1.0, 1.0);
  q.normalize();

  std::vector<Eigen::VectorXd> basis{q};
  std::vector<double> alpha;
  std::vector<double> beta;
  const auto total = static_cast<std::size_t>(n);
  std::size_t target = std::min(total, std::max<std::size_t>(2 * want + 20, 40));
  std::vector<double> residuals;

  while (true) {
    while (alpha.size() < target) {
      Eigen::VectorXd w = solver.solve(basis.back());
      alpha.push_back(basis.back().dot(w));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : basis) w -= v.dot(w) * v;
      }
      const double b = w.norm();
      if (alpha.size() == total || b <= 1e-14 * std::abs(alpha.front())) {
        target = alpha.size();  // invariant subspace
        break;
      }
      beta.push_back(b);
      basis.emplace_back(w / b);
    }
    const std::size_t m = alpha.size();
    const std::vector<double> off(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(m - 1));
    const auto te = tridiagonal_eigen(alpha, off, true);
    const std::size_t got = std::min(want, m);

    ModeResult out;
    out.vectors.resize(n, static_cast<Eigen::Index>(got));
    residuals.assign(got, 0.0);
    bool converged = got == want;
    // the largest theta are the eigenvalues nearest sigma from above
    for (std::size_t j = 0; j < got; ++j) {
      const std::size_t col = m - 1 - j;
      const double theta = te.values[col];
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < m; ++i) y += te.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) * basis[i];
      y.normalize();
      const double lambda = sigma + 1.0 / theta;
      const double res = (a * y - lambda * y).norm();
      residuals[j] = res / std::abs(lambda);
      if (!(residuals[j] <= tol)) converged = false;
      out.values.push_back(lambda);
      out.vectors.col(static_cast<Eigen::Index>(j)) = y;
    }
    if (converged) {
      // ascending order; Ritz values of the largest theta come out that way
      std::vector<std::size_t> order(got);
      for (std::size_t j = 0; j < got; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t z) { return out.values[x] < out.values[z]; });
      ModeResult sorted;
      sorted.vectors.resize(n, static_cast<Eigen::Index>(got));
      for (std::size_t j = 0; j < got; ++j) {
        sorted.values.push_back(out.values[order[j]]);
        sorted.residuals.push_back(residuals[order[j]]);
        Eigen::VectorXd v = out.vectors.col(static_cast<Eigen::Index>(order[j]));
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (v(big) < 0.0) v = -v;
        sorted.vectors.col(static_cast<Eigen::Index>(j)) = v / h;
      }
      return sorted;
    }
    if (m >= total) {
      throw ConvergenceFailure("Lanczos exhausted the space without converging " + std::to_string(want) + " modes",
                               residuals);
    }
    target = std::min(total, m + std::max<std::size_t>(m / 2, 20));
  }
}

}  // namespace detail

/// Eigenpairs of the Laplacian below `request.threshold` (or the lowest
/// `request.count`). The shift is placed just under the lowest eigenvalue,
/// located by inertia bisection, so A - sigma stays positive definite and
/// the wanted modes are the extreme end of the shift-inverted spectrum.
inline ModeResult lowest_modes(const SparseOperator& op, const ModeRequest& request, double tol = 1e-9) {
  const SparseMatrix& a = op.matrix;
  if (a.rows() == 0) throw InvalidInput("empty operator");
  std::size_t want = request.count;
  double top = 0.0;
  if (request.threshold) {
    top = *request.threshold;
    want = count_below(a, top);
  } else {
    if (want == 0) throw InvalidInput("mode request needs a threshold or a positive count");
    want = std::min(want, static_cast<std::size_t>(a.rows()));
    // grow an upper bracket until it holds `want` eigenvalues
    top = std::numbers::e / (op.h * op.h);
    while (count_below(a, top) < want) top *= 2.0;
  }
  ModeResult out;
  out.threshold = request.threshold.value_or(std::numeric_limits<double>::quiet_NaN());
  out.count_below = want;
  if (want == 0) {
    out.vectors.resize(a.rows(), 0);
    return out;
  }

  // bisect for the lowest eigenvalue from below: lo has no eigenvalue
  // beneath it, hi has at least one
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 30 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, mid) == 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // keep a margin so the shifted matrix is comfortably definite
  const double sigma = lo - 1e-3 * (hi - lo + 1e-3 * hi);
  auto modes = detail::shift_invert_lanczos(a, sigma, want, op.h, tol);
  modes.threshold = out.threshold;
  modes.count_below = want;
  return modes;
}

/// The L-shaped domain: one corner with two arms.
inline GuideGeometry corner_geometry(double arm_length, double width = 1.0) {
  return trace_geometry({}, {Turn::Left}, width, arm_length);
}

enum class PairShape { U, S };

inline std::string to_string(PairShape s) { return s == PairShape::U ? "U" : "S"; }

/// Two corners `separation` apart: U turns the same way twice, S opposite.
inline GuideGeometry pair_geometry(double separation, PairShape shape, double arm_length, double width = 1.0) {
  const std::vector<Turn> turns = shape == PairShape::U ? std::vector<Turn>{Turn::Left, Turn::Left}
                                                        : std::vector<Turn>{Turn::Left, Turn::Right};
  return trace_geometry({separation}, turns, width, arm_length);
}

struct CornerState {
  double h = 0.0;
  double e_b = 0.0;
  /// Discrete threshold on the same grid.
  double e_t = 0.0;
  double ratio = 0.0;
  std::size_t bound_states = 0;
};

inline CornerState corner_bound_state(double arm_length, double h, double width = 1.0) {
  if (arm_length < 6.0 * width * (1.0 - 1e-12)) throw InvalidInput("corner arms must be at least 6 L long");
  const auto domain = rasterize_mask(corner_geometry(arm_length, width), h);
  const double et = discrete_threshold(h, width);
  const auto modes = lowest_modes(assemble_laplacian(domain), {et, 0});
  if (modes.values.empty()) throw ConvergenceFailure("no bound state found below the corner threshold", {});
  return {h, modes.values.front(), et, modes.values.front() / et, modes.values.size()};
}

struct CornerExtrapolation {
  std::vector<CornerState> states;
  /// Richardson with order 2 on the two finest grids.
  double ratio = 0.0;
  /// (r_1 - r_2) / (r_2 - r_3) over three successive halvings; 4 for a
  /// clean second-order sequence.
  double difference_ratio = std::numeric_limits<double>::quiet_NaN();
  /// log2 of difference_ratio.
  double observed_order = std::numeric_limits<double>::quiet_NaN();
};

/// E_b / E_t(h) on grids L / m for each m (ascending m, successive halvings
/// for the order estimate), extrapolated to h = 0.
inline CornerExtrapolation corner_extrapolation(double arm_length, const std::vector<long>& ms, double width = 1.0,
                                                unsigned threads = 1) {
  if (ms.size() < 2) throw InvalidInput("extrapolation needs at least two grids");
  CornerExtrapolation out;
  out.states.resize(ms.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < ms.size(); i += stride) {
      out.states[i] = corner_bound_state(arm_length, width / static_cast<double>(ms[i]), width);
    }
  };
  const unsigned nt = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(ms.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work, t, nt);
  work(0, nt);
  for (auto& th : pool) th.join();

  const std::size_t k = ms.size();
  const double coarse = out.states[k - 2].ratio;
  const double fine = out.states[k - 1].ratio;
  const double q = static_cast<double>(ms[k - 1]) / static_cast<double>(ms[k - 2]);
  out.ratio = fine + (fine - coarse) / (q * q - 1.0);
  if (k >= 3) {
    out.difference_ratio = (out.states[k - 3].ratio - coarse) / (coarse - fine);
    out.observed_order = std::log2(out.difference_ratio);
  }
  return out;
}

struct Splitting {
  double separation = 0.0;
  PairShape shape = PairShape::U;
  double e_lower = 0.0;
  double e_upper = 0.0;
  /// e_upper - e_lower.
  double delta_e = 0.0;
  /// delta_e / 2.
  double coupling = 0.0;
  /// Mirror parity (+1 / -1) of the lower and upper modes.
  int lower_parity = 0;
  int upper_parity = 0;
};

/// Overlap sign of a mode with its image under the pair's symmetry: the
/// mirror y -> d - y for U, the half turn about the pair's centre for S.
inline int pair_parity(const GridDomain& d, const Eigen::VectorXd& v, double separation, PairShape shape,
                       double* defect = nullptr) {
  double dot = 0.0;
  double worst = 0.0;
  const double vmax = v.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < d.unknowns(); ++k) {
    const auto [r, c] = d.nodes[k];
    const double x = d.x(c);
    const double y = d.y(r);
    const double mx = shape == PairShape::U ? x : -x;
    const double my = separation - y;
    const long cc = std::lround((mx - d.x0) / d.h);
    const long rr = std::lround((my - d.y0) / d.h);
    if (cc < 0 || rr < 0 || cc >= static_cast<long>(d.cols) || rr >= static_cast<long>(d.rows)) continue;
    const long j = d.index[static_cast<std::size_t>(rr) * d.cols + static_cast<std::size_t>(cc)];
    if (j < 0) continue;
    const double vi = v(static_cast<Eigen::Index>(k));
    const double vj = v(j);
    dot += vi * vj;
    worst = std::max(worst, std::min(std::abs(vi - vj), std::abs(vi + vj)));
  }
  if (defect) *defect = worst / vmax;
  return dot >= 0.0 ? 1 : -1;
}

/// The two lowest levels of the pair; throws FewerThanTwoBoundStates when
/// only one lies below the discrete threshold.
inline Splitting two_corner_splitting(double separation, PairShape shape, double h, double arm_length = 8.0,
                                      double width = 1.0) {
  if (separation < 2.0 * width * (1.0 - 1e-12)) throw InvalidInput("corner separation must be at least 2 L");
  const auto domain = rasterize_mask(pair_geometry(separation, shape, arm_length, width), h);
  const auto modes = lowest_modes(assemble_laplacian(domain), {discrete_threshold(h, width), 0});
  if (modes.values.size() < 2) {
    throw FewerThanTwoBoundStates("only " + std::to_string(modes.values.size()) + " level below threshold at d = " +
                                      std::to_string(separation),
                                  modes.values.empty() ? std::numeric_limits<double>::quiet_NaN() : modes.values[0]);
  }
  Splitting s;
  s.separation = separation;
  s.shape = shape;
  s.e_lower = modes.values[0];
  s.e_upper = modes.values[1];
  s.delta_e = s.e_upper - s.e_lower;
  s.coupling = 0.5 * s.delta_e;
  // snapped geometry: the symmetry centre sits on the lattice
  const double snapped = std::round(separation / h) * h;
  s.lower_parity = pair_parity(domain, modes.vectors.col(0), snapped, shape);
  s.upper_parity = pair_parity(domain, modes.vectors.col(1), snapped, shape);
  return s;
}

/// two_corner_splitting over every separation, in order.
inline std::vector<Splitting> splitting_sweep(const std::vector<double>& separations, PairShape shape, double h,
                                              double arm_length = 8.0, double width = 1.0, unsigned threads = 1) {
  std::vector<Splitting> out(separations.size());
  std::vector<std::string> errors(separations.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < separations.size(); i += stride) {
      try {
        out[i] = two_corner_splitting(separations[i], shape, h, arm_length, width);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned nt = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(separations.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work, t, nt);
  work(0, nt);
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    // rerun on this thread so the original exception type propagates
    if (!errors[i].empty()) two_corner_splitting(separations[i], shape, h, arm_length, width);
  }
  return out;
}

struct DecayFit {
  double lambda = 0.0;
  double delta0 = 0.0;
  /// |Pearson r| of (d, ln F).
  double correlation = 0.0;
};

/// Least squares of ln F against d: slope -1 / lambda, intercept ln delta0.
inline DecayFit fit_decay_law(const std::vector<double>& d, const std::vector<double>& f) {
  if (d.size() != f.size()) throw DimensionMismatch("decay fit needs one F per separation");
  std::vector<double> lf;
  for (double v : f) {
    if (!(v > 0.0)) throw InvalidInput("decay fit needs positive couplings");
    lf.push_back(std::log(v));
  }
  const auto line = fit_line(d, lf);
  if (!(line.slope < 0.0)) throw DegenerateTarget("couplings do not decay with separation");
  return {-1.0 / line.slope, std::exp(line.intercept), std::sqrt(std::max(line.r_squared, 0.0))};
}

struct GuideSpectrum {
  std::vector<double> levels;
  double e_t = 0.0;
  /// E_b(h) + s eig(F), when a design was supplied.
  std::vector<double> predicted;
  /// (level - predicted) / half-window, level by level.
  std::vector<double> deviation;
};

struct TightBindingModel {
  ChainCouplings couplings;
  double scale = 0.0;
  /// Same-grid single-corner energy.
  double e_b = 0.0;
};

/// Sub-threshold levels of a guide, optionally against a tight-binding
/// design with the window half-width min(E_b, E_t - E_b) as the unit.
inline GuideSpectrum spectrum_below_threshold(const GuideGeometry& geometry, double h,
                                              const std::optional<TightBindingModel>& design = std::nullopt) {
  const auto domain = rasterize_mask(geometry, h);
  GuideSpectrum out;
  out.e_t = discrete_threshold(h, geometry.width);
  out.levels = lowest_modes(assemble_laplacian(domain), {out.e_t, 0}).values;
  if (design) {
    out.predicted = tight_binding_levels(design->couplings, design->e_b, design->scale);
    const double half = std::min(design->e_b, out.e_t - design->e_b);
    for (std::size_t i = 0; i < std::min(out.levels.size(), out.predicted.size()); ++i) {
      out.deviation.push_back((out.levels[i] - out.predicted[i]) / half);
    }
  }
  return out;
}

}  // namespace invlat
