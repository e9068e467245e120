#pragma once

// Symmetric tridiagonal eigensolvers: implicit-shift QL (production route)
// and Sturm-sequence bisection (independent check of the eigenvalues).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"

namespace invlat {

struct TridiagonalEigen {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // column k pairs with values[k]; empty if not requested
};

/// Implicit QL with Wilkinson shifts for the symmetric tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off` (off[i] couples i and i+1).
inline TridiagonalEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> off,
                                          bool want_vectors = true) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (static_cast<int>(off.size()) + 1 != n) {
    throw DimensionMismatch("tridiagonal: off-diagonal must have size n-1");
  }
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(off.begin(), off.end(), e.begin());

  Eigen::MatrixXd z;
  if (want_vectors) z = Eigen::MatrixXd::Identity(n, n);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > 100) throw ConvergenceFailure("implicit QL did not converge", {});

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double t = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * t;
            z(k, i) = c * z(k, i) - s * t;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.values.reserve(static_cast<std::size_t>(n));
  for (int k : order) out.values.push_back(d[k]);
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd col = z.col(order[k]);
      col.normalize();
      // first component of a Jacobi-matrix eigenvector never vanishes; pick
      // the largest one when the chain is disconnected
      Eigen::Index pivot = 0;
      if (std::abs(col(0)) < 1e-12) col.cwiseAbs().maxCoeff(&pivot);
      if (col(pivot) < 0.0) col = -col;
      out.vectors.col(k) = col;
    }
  }
  return out;
}

/// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
inline std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
  std::size_t count = 0;
  double q = 1.0;
  constexpr double tiny = 1e-300;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double e2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = (diag[i] - x) - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

/// Eigenvalues by bisection on the Sturm count, ascending.
inline std::vector<double> sturm_eigenvalues(std::span<const double> diag, std::span<const double> off,
                                             double abs_tol = 1e-14) {
  const std::size_t n = diag.size();
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < n) radius += std::abs(off[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  const double pad = 1e-12 * std::max(1.0, hi - lo);
  lo -= pad;
  hi += pad;
  const double tol = std::max(abs_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)));

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo;
    double b = hi;
    // smallest x with count(x) > k
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      if (sturm_count(diag, off, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

/// Full eigensystem of the zero-diagonal chain Hamiltonian.
inline EigenSystem eig_jacobi(const ChainCouplings& couplings) {
  const std::vector<double> diag(couplings.sites(), 0.0);
  auto te = tridiagonal_eigen(diag, couplings.values(), true);
  // tolerance well above round-off, below any genuine asymmetry
  return {SymmetricSpectrum(std::move(te.values), 1e-10), std::move(te.vectors)};
}

/// Spectrum of the chain by Sturm bisection (verification route).
inline std::vector<double> eig_jacobi_bisection(const ChainCouplings& couplings) {
  const std::vector<double> diag(couplings.sites(), 0.0);
  return sturm_eigenvalues(diag, couplings.values());
}

/// Closed-form eigensystem of the unit chain F_n = 1 with N+1 sites:
/// <n|k> = sqrt(2/(N+2)) sin(n k pi/(N+2)), E_k = 2 cos(k pi/(N+2)).
/// Columns ordered by ascending energy, i.e. k = N+1 first.
inline EigenSystem homogeneous_eigensystem(std::size_t chain_index) {
  const std::size_t sites = chain_index + 1;
  const double denom = static_cast<double>(chain_index + 2);
  const double norm = std::sqrt(2.0 / denom);
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(sites), static_cast<Eigen::Index>(sites));
  std::vector<double> energies(sites);
  for (std::size_t col = 0; col < sites; ++col) {
    const std::size_t k = sites - col;
    energies[col] = 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / denom);
    for (std::size_t n = 1; n <= sites; ++n) {
      vectors(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(col)) =
          norm * std::sin(static_cast<double>(n * k) * std::numbers::pi / denom);
    }
  }
  // the zero level of an odd-length chain comes out as ~1e-17
  for (auto& e : energies) {
    if (std::abs(e) < 1e-15) e = 0.0;
  }
  return {SymmetricSpectrum(std::move(energies), 1e-12), std::move(vectors)};
}

/// Mode index k (1-based, as in <n|k>) of column `col` of homogeneous_eigensystem.
inline std::size_t homogeneous_mode_index(std::size_t chain_index, std::size_t col) {
  return chain_index + 1 - col;
}

}  // namespace invlat
