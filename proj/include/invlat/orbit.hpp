#pragma once

// Isospectral orbits through the lateral factor: H = A H_0 A^dagger with
// A diagonal and H_0 the unit chain. A unitary X commuting with H_0 maps the
// Gram diagonal |A_n|^2 to a new one, from which new couplings follow.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"
#include "invlat/tridiagonal.hpp"

namespace invlat {

/// Real lateral factor A_1..A_{N+1} with A_n A_{n+1} = F_n.
struct LateralFactor {
  std::vector<double> entries;

  std::size_t size() const noexcept { return entries.size(); }

  /// F_n = |A_n| |A_{n+1}|; the free parameter A_1 drops out.
  ChainCouplings couplings() const {
    std::vector<double> f;
    for (std::size_t n = 0; n + 1 < entries.size(); ++n) f.push_back(std::abs(entries[n] * entries[n + 1]));
    return ChainCouplings(std::move(f));
  }
};

/// Phases alpha(1)..alpha(N+1), one per mode of the unit chain.
struct OrbitPhases {
  std::vector<double> alpha;
};

inline LateralFactor lateral_factor(const ChainCouplings& couplings, double a1) {
  if (!(std::abs(a1) > 0.0) || !std::isfinite(a1)) throw InvalidInput("A_1 must be finite and nonzero");
  std::vector<double> a{a1};
  for (std::size_t n = 0; n < couplings.size(); ++n) a.push_back(couplings[n] / a.back());
  return {std::move(a)};
}

/// X = sum_k exp(-i alpha(k)) |k><k| in the site basis, with |k> the modes
/// of the unit chain.
inline Eigen::MatrixXcd build_X(const OrbitPhases& phases) {
  if (phases.alpha.empty()) throw InvalidInput("orbit phases must not be empty");
  const std::size_t sites = phases.alpha.size();
  const auto h0 = homogeneous_eigensystem(sites - 1);
  const auto n = static_cast<Eigen::Index>(sites);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const std::size_t k = homogeneous_mode_index(sites - 1, static_cast<std::size_t>(col));
    const std::complex<double> w = std::polar(1.0, -phases.alpha[k - 1]);
    const Eigen::VectorXd v = h0.vectors.col(col);
    x += w * (v * v.transpose()).cast<std::complex<double>>();
  }
  return x;
}

/// Gram matrix G = X^dagger diag(|A_n|^2) X of the image factor.
inline Eigen::MatrixXcd orbit_gram(const LateralFactor& factor, const OrbitPhases& phases) {
  if (factor.size() != phases.alpha.size()) {
    throw DimensionMismatch("lateral factor and phases differ in length");
  }
  const Eigen::MatrixXcd x = build_X(phases);
  Eigen::VectorXcd d(static_cast<Eigen::Index>(factor.size()));
  for (std::size_t n = 0; n < factor.size(); ++n) d(static_cast<Eigen::Index>(n)) = factor.entries[n] * factor.entries[n];
  return x.adjoint() * d.asDiagonal() * x;
}

/// Image couplings for phases `alpha`, or nothing when alpha is not
/// admissible for this factor (G not diagonal to `tol` relative).
inline std::optional<ChainCouplings> orbit_map(const LateralFactor& factor, const OrbitPhases& phases,
                                               double tol = 1e-10) {
  const Eigen::MatrixXcd g = orbit_gram(factor, phases);
  const Eigen::Index n = g.rows();
  double diag_max = 0.0;
  double off_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag_max = std::max(diag_max, std::abs(g(i, i)));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) off_max = std::max(off_max, std::abs(g(i, j)));
    }
  }
  if (off_max > tol * diag_max) return std::nullopt;

  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gii = g(i, i).real();
    if (gii < -1e-12 * diag_max) {
      throw NegativeDiagonal("orbit Gram diagonal G_" + std::to_string(i + 1) + " = " + std::to_string(gii));
    }
    moduli.push_back(std::sqrt(std::max(gii, 0.0)));
  }
  return LateralFactor{std::move(moduli)}.couplings();
}

/// Image factor |A~_n| = sqrt(G_nn) for admissible phases.
inline LateralFactor orbit_image_factor(const LateralFactor& factor, const OrbitPhases& phases) {
  const Eigen::MatrixXcd g = orbit_gram(factor, phases);
  std::vector<double> a;
  for (Eigen::Index i = 0; i < g.rows(); ++i) a.push_back(std::sqrt(std::max(g(i, i).real(), 0.0)));
  return {std::move(a)};
}

struct OrbitReport {
  /// |prod |A~|^2 - prod |A|^2| / prod |A|^2.
  double product_violation = 0.0;
  /// max over (k, k') of the mismatch in |<k| diag(|A|^2) |k'>|^2, relative
  /// to the largest such entry.
  double mixed_basis_violation = 0.0;
};

inline OrbitReport orbit_invariants(const LateralFactor& source, const LateralFactor& image) {
  if (source.size() != image.size() || source.size() == 0) {
    throw DimensionMismatch("orbit invariants need two factors of equal nonzero length");
  }
  OrbitReport report;
  double ps = 1.0;
  double pi = 1.0;
  for (std::size_t n = 0; n < source.size(); ++n) {
    ps *= source.entries[n] * source.entries[n];
    pi *= image.entries[n] * image.entries[n];
  }
  report.product_violation = std::abs(pi - ps) / std::abs(ps);

  const auto h0 = homogeneous_eigensystem(source.size() - 1);
  const Eigen::MatrixXd& v = h0.vectors;
  Eigen::VectorXd ds(v.rows());
  Eigen::VectorXd di(v.rows());
  for (Eigen::Index n = 0; n < v.rows(); ++n) {
    ds(n) = source.entries[static_cast<std::size_t>(n)] * source.entries[static_cast<std::size_t>(n)];
    di(n) = image.entries[static_cast<std::size_t>(n)] * image.entries[static_cast<std::size_t>(n)];
  }
  const Eigen::MatrixXd ms = (v.transpose() * ds.asDiagonal() * v).cwiseAbs2();
  const Eigen::MatrixXd mi = (v.transpose() * di.asDiagonal() * v).cwiseAbs2();
  report.mixed_basis_violation = (ms - mi).cwiseAbs().maxCoeff() / ms.cwiseAbs().maxCoeff();
  return report;
}

/// Admissible phase vectors on a grid: alpha(1) = 0 (a global phase acts
/// trivially) and the others range over `steps` equally spaced values in
/// [0, 2 pi). Cost is steps^N; meant for short chains.
inline std::vector<OrbitPhases> scan_admissible(const LateralFactor& factor, std::size_t steps, double tol = 1e-10) {
  const std::size_t sites = factor.size();
  if (steps == 0 || sites == 0) return {};
  const double combos = std::pow(static_cast<double>(steps), static_cast<double>(sites - 1));
  if (combos > 1e6) throw SizeLimit("admissible-phase scan exceeds 1e6 grid points");
  std::vector<OrbitPhases> found;
  std::vector<std::size_t> digit(sites, 0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(steps);
  while (true) {
    OrbitPhases ph;
    for (std::size_t d : digit) ph.alpha.push_back(step * static_cast<double>(d));
    if (orbit_map(factor, ph, tol)) found.push_back(ph);
    std::size_t pos = 1;
    while (pos < sites && ++digit[pos] == steps) digit[pos++] = 0;
    if (pos >= sites) break;
  }
  return found;
}

}  // namespace invlat
