#pragma once

// Value types for nearest-neighbour chains without on-site potentials.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invlat/error.hpp"

namespace invlat {

/// Positive hopping amplitudes F_1..F_N of an (N+1)-site chain.
///
/// Zero couplings disconnect the chain and are rejected; complex or signed
/// couplings are brought to this form by `gauge_reduce`.
class ChainCouplings {
 public:
  ChainCouplings() = default;

  explicit ChainCouplings(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || !(values_[i] > 0.0)) {
        throw InvalidInput("coupling F_" + std::to_string(i + 1) +
                           " must be finite and positive, got " + std::to_string(values_[i]));
      }
    }
  }

  /// Chain index N (number of couplings).
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t sites() const noexcept { return values_.size() + 1; }
  bool empty() const noexcept { return values_.empty(); }

  /// Zero-based access: `(*this)[0]` is F_1.
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const noexcept {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }

  ChainCouplings scaled(double c) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= c;
    return ChainCouplings(std::move(v));
  }

  ChainCouplings reversed() const {
    return ChainCouplings(std::vector<double>(values_.rbegin(), values_.rend()));
  }

  friend bool operator==(const ChainCouplings&, const ChainCouplings&) = default;

 private:
  std::vector<double> values_;
};

/// Eigenvalue multiset symmetric about zero, stored ascending.
///
/// Construction validates the mirror symmetry: after sorting, e_i + e_{n-1-i}
/// must vanish within `rel_tol * max|E|`. Values are kept as given (not
/// symmetrised).
class SymmetricSpectrum {
 public:
  static constexpr double kDefaultTolerance = 1e-9;

  SymmetricSpectrum() : values_{0.0} {}

  explicit SymmetricSpectrum(std::vector<double> values, double rel_tol = kDefaultTolerance)
      : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInput("spectrum must contain at least one level");
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidInput("spectrum contains a non-finite value");
    }
    std::sort(values_.begin(), values_.end());
    const double scale = radius();
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double defect = std::abs(values_[i] + values_[n - 1 - i]);
      if (defect > rel_tol * scale + 1e-300) {
        throw SymmetryViolation("spectrum is not symmetric about zero: E=" +
                                std::to_string(values_[i]) + " has no partner -E (defect " +
                                std::to_string(defect) + ")");
      }
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  /// Chain index N = size - 1.
  std::size_t order() const noexcept { return values_.size() - 1; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// max |E_k|.
  double radius() const noexcept {
    return std::max(std::abs(values_.front()), std::abs(values_.back()));
  }

  /// The upper half of the levels, E >= 0 side, ascending (floor(n/2) values).
  std::vector<double> positive_half() const {
    return std::vector<double>(values_.end() - static_cast<std::ptrdiff_t>(values_.size() / 2),
                               values_.end());
  }

 private:
  std::vector<double> values_;
};

/// Coefficients Lambda_N^0 .. Lambda_N^{N+1} of Phi_N(lambda) = det(H + lambda),
/// lowest order first.
struct CharPolyCoeffs {
  std::vector<double> coeffs;

  /// Chain index N (degree minus one).
  std::size_t order() const noexcept { return coeffs.size() - 1 - 1; }
  std::size_t degree() const noexcept { return coeffs.size() - 1; }
  double operator[](std::size_t j) const { return coeffs[j]; }
};

/// All eigenpairs of a chain. Column k of `vectors` holds phi_n^k for the
/// k-th eigenvalue in ascending order; each column is normalised with a
/// positive first component.
struct EigenSystem {
  SymmetricSpectrum spectrum;
  Eigen::MatrixXd vectors;
};

/// Dense (N+1)x(N+1) Hamiltonian with zero diagonal.
inline Eigen::MatrixXd hamiltonian(const ChainCouplings& f) {
  const auto n = static_cast<Eigen::Index>(f.sites());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = f[static_cast<std::size_t>(i)];
    h(i + 1, i) = f[static_cast<std::size_t>(i)];
  }
  return h;
}

}  // namespace invlat
