#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"

namespace invlat {

struct GaugeReduction {
  ChainCouplings moduli;
  /// Accumulated phases Delta_1..Delta_{N+1}, Delta_1 = 0 and
  /// Delta_n = sum_{j<n} arg F_j. Multiplying phi_n by exp(i Delta_n) maps
  /// an eigenvector of the complex chain onto one of the modulus chain.
  std::vector<double> phases;
};

/// Replaces complex couplings by their moduli. A loop-free chain carries no
/// gauge-invariant phase, so the spectrum is unchanged.
inline GaugeReduction gauge_reduce(std::span<const std::complex<double>> couplings) {
  std::vector<double> moduli;
  std::vector<double> phases{0.0};
  moduli.reserve(couplings.size());
  double accumulated = 0.0;
  for (std::size_t n = 0; n < couplings.size(); ++n) {
    const double r = std::abs(couplings[n]);
    if (!(r > 0.0)) {
      throw InvalidInput("coupling F_" + std::to_string(n + 1) + " has zero modulus; chain disconnects");
    }
    moduli.push_back(r);
    accumulated += std::arg(couplings[n]);
    phases.push_back(accumulated);
  }
  return {ChainCouplings(std::move(moduli)), std::move(phases)};
}

/// Dense Hermitian Hamiltonian with H(n, n+1) = F_n, H(n+1, n) = conj(F_n).
inline Eigen::MatrixXcd complex_hamiltonian(std::span<const std::complex<double>> couplings) {
  const auto n = static_cast<Eigen::Index>(couplings.size() + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = couplings[static_cast<std::size_t>(i)];
    h(i + 1, i) = std::conj(couplings[static_cast<std::size_t>(i)]);
  }
  return h;
}

}  // namespace invlat
