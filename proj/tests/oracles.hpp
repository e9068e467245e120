#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "invlat/chain.hpp"

namespace oracle {

/// Ascending eigenvalues of the dense chain Hamiltonian (Eigen's solver).
inline std::vector<double> dense_spectrum(const invlat::ChainCouplings& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(invlat::hamiltonian(f), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

inline std::vector<double> dense_spectrum(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

/// Coefficients of prod_k (lambda + E_k) by summing over every subset:
/// coefficient of lambda^j is the sum of all (n-j)-fold products.
inline std::vector<double> subset_expansion(const std::vector<double>& energies) {
  const std::size_t n = energies.size();
  std::vector<double> c(n + 1, 0.0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prod = 1.0;
    std::size_t picked = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1U) {
        prod *= energies[k];
        ++picked;
      }
    }
    c[n - picked] += prod;
  }
  return c;
}

/// Determinant expansion of det(H + lambda) at one lambda via dense LU.
inline double dense_det(const invlat::ChainCouplings& f, double lambda) {
  Eigen::MatrixXd h = invlat::hamiltonian(f);
  h.diagonal().array() += lambda;
  return h.determinant();
}

inline invlat::ChainCouplings random_chain(std::mt19937_64& rng, std::size_t n, double lo = 0.2, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> f(n);
  for (auto& x : f) x = u(rng);
  return invlat::ChainCouplings(std::move(f));
}

/// Symmetric spectrum with N+1 levels in [-1, 1] whose distinct entries are
/// separated by at least `gap`.
inline std::vector<double> random_symmetric_levels(std::mt19937_64& rng, std::size_t sites, double gap) {
  const std::size_t half = sites / 2;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    std::vector<double> pos(half);
    for (auto& e : pos) e = u(rng);
    std::sort(pos.begin(), pos.end());
    const double top = pos.empty() ? 1.0 : pos.back();
    std::vector<double> out;
    for (double e : pos) out.push_back(e / top);
    for (double e : pos) out.push_back(-e / top);
    if (sites % 2 == 1) out.push_back(0.0);
    std::sort(out.begin(), out.end());
    bool spaced = true;
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i] - out[i - 1] < gap) spaced = false;
    }
    if (spaced) return out;
  }
}

/// A point on the isospectral surface of `levels` by Lanczos tridiagonalisation
/// of diag(E) from a start vector with mirror-symmetric weights. Symmetric
/// weights make the diagonal vanish, so the result is a zero-diagonal chain.
inline invlat::ChainCouplings lanczos_chain(const std::vector<double>& levels, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(levels.size());
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const double x = u(rng);
    w(i) = x;
    w(n - 1 - i) = x;
  }
  if (n % 2 == 1) w(n / 2) = u(rng);
  Eigen::MatrixXd q(n, n);
  q.col(0) = w.normalized();
  const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(levels.data(), n);
  std::vector<double> beta;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Eigen::VectorXd v = e.cwiseProduct(q.col(k));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j <= k; ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    beta.push_back(v.norm());
    q.col(k + 1) = v / beta.back();
  }
  return invlat::ChainCouplings(std::move(beta));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Pearson R^2 of y against x, computed independently of the library.
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double cov = sxy - sx * sy / n;
  return cov * cov / ((sxx - sx * sx / n) * (syy - sy * sy / n));
}

}  // namespace oracle
