#pragma once

// Characteristic polynomial Phi_N(lambda) = det(H + lambda) of a chain, by
// the size recurrence, by the unrolled multi-index sum, and from a spectrum.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"

namespace invlat {

/// Lambda_N^j for all j by the lattice recurrence
///   Lambda_N^j = Lambda_{N-1}^{j-1} - F_N^2 Lambda_{N-2}^j,
/// seeded with Phi_{-1} = 1 and Phi_0 = lambda. O(N^2).
inline CharPolyCoeffs charpoly_coeffs(const ChainCouplings& couplings) {
  std::vector<double> older{1.0};      // Phi_{N-2}
  std::vector<double> prev{0.0, 1.0};  // Phi_{N-1}
  for (std::size_t n = 0; n < couplings.size(); ++n) {
    const double f2 = couplings[n] * couplings[n];
    std::vector<double> next(prev.size() + 1, 0.0);
    for (std::size_t j = 1; j < next.size(); ++j) next[j] = prev[j - 1];
    for (std::size_t j = 0; j < older.size(); ++j) next[j] -= f2 * older[j];
    older = std::move(prev);
    prev = std::move(next);
  }
  return {std::move(prev)};
}

/// Lambda_N^0 in closed form: 0 for even N, otherwise
/// (-1)^{(N+1)/2} prod_{k=0}^{(N-1)/2} F_{N-2k}^2.
inline double charpoly_constant_term(const ChainCouplings& couplings) {
  const std::size_t n = couplings.size();
  if (n % 2 == 0) return 0.0;
  double prod = 1.0;
  for (std::size_t idx = n; idx >= 1; idx -= 2) {
    prod *= couplings[idx - 1] * couplings[idx - 1];
    if (idx < 2) break;
  }
  return ((n + 1) / 2) % 2 == 0 ? prod : -prod;
}

/// Largest chain index accepted by `charpoly_coeffs_closed`.
inline constexpr std::size_t kClosedFormMaxOrder = 12;

namespace detail {

// Sum over n_level .. n_{j-1} of the unrolled recurrence. `size` is the chain
// index reached at this level (N - 2 sum n_i - level), `remaining` the order
// still to peel off.
inline double closed_form_level(const ChainCouplings& f, long size, std::size_t remaining) {
  if (remaining == 0) {
    // last level: n_j = (size + 1) / 2 couplings F_size, F_{size-2}, ...
    if (size < -1 || (size + 1) % 2 != 0) return 0.0;
    double prod = 1.0;
    long count = (size + 1) / 2;
    for (long l = 0; l < count; ++l) {
      const double fl = f[static_cast<std::size_t>(size - 2 * l - 1)];
      prod *= fl * fl;
    }
    return count % 2 == 0 ? prod : -prod;
  }
  const long upper = (size - static_cast<long>(remaining) + 1) / 2;
  double total = 0.0;
  double prod = 1.0;  // prod_{l<n} F_{size-2l}^2
  for (long n = 0; n <= upper; ++n) {
    if (n > 0) {
      const double fl = f[static_cast<std::size_t>(size - 2 * (n - 1) - 1)];
      prod *= fl * fl;
    }
    const double inner = closed_form_level(f, size - 2 * n - 1, remaining - 1);
    total += (n % 2 == 0 ? prod : -prod) * inner;
  }
  return total;
}

}  // namespace detail

/// Lambda_N^j from the explicit multi-index sum (the recurrence unrolled in
/// the order index). Combinatorial cost; capped at N <= kClosedFormMaxOrder.
inline double charpoly_coeffs_closed(const ChainCouplings& couplings, std::size_t j,
                                     std::size_t max_order = kClosedFormMaxOrder) {
  const std::size_t n = couplings.size();
  if (n > max_order) {
    throw SizeLimit("closed-form coefficients limited to N <= " + std::to_string(max_order) +
                    ", got N = " + std::to_string(n));
  }
  if (j > n + 1) throw InvalidInput("order j exceeds N+1");
  if (j == n + 1) return 1.0;
  if ((n - j) % 2 == 0) return 0.0;
  return detail::closed_form_level(couplings, static_cast<long>(n), j);
}

/// Coefficients of prod_k (lambda + E_k), built by multiplying in one linear
/// factor at a time. The coefficient of lambda^j is e_{N+1-j}(E). Orders
/// with N-j even vanish for a symmetric spectrum and are set to exact zero.
inline CharPolyCoeffs esp_from_spectrum(const SymmetricSpectrum& spectrum) {
  std::vector<double> c{1.0};
  for (double e : spectrum.values()) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] += e * c[j];
    }
    c = std::move(next);
  }
  const std::size_t degree = spectrum.size();
  for (std::size_t j = 0; j < degree; ++j) {
    if ((degree - j) % 2 == 1) c[j] = 0.0;
  }
  return {std::move(c)};
}

/// Horner evaluation of sum_j Lambda^j lambda^j.
inline double charpoly_eval(const CharPolyCoeffs& p, double lambda) {
  double acc = 0.0;
  for (std::size_t j = p.coeffs.size(); j-- > 0;) acc = acc * lambda + p.coeffs[j];
  return acc;
}

}  // namespace invlat
