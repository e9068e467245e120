#pragma once

// Exactly solvable coupling families and the spectra they produce.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"
#include "invlat/fit.hpp"
#include "invlat/tridiagonal.hpp"

namespace invlat {

enum class ModelTag { FiniteOscillator, PositionChain, DiracOscillator, Uniform };

inline std::string to_string(ModelTag t) {
  switch (t) {
    case ModelTag::FiniteOscillator: return "finite-oscillator";
    case ModelTag::PositionChain: return "position-chain";
    case ModelTag::DiracOscillator: return "dirac-oscillator";
    case ModelTag::Uniform: return "uniform";
  }
  return "?";
}

inline ModelTag model_tag_from_string(const std::string& s) {
  for (auto t : {ModelTag::FiniteOscillator, ModelTag::PositionChain, ModelTag::DiracOscillator, ModelTag::Uniform}) {
    if (to_string(t) == s) return t;
  }
  throw InvalidInput("unknown model '" + s + "'");
}

struct ModelKind {
  ModelTag tag = ModelTag::FiniteOscillator;
  /// Number of sites N+1; twice the dimer count for the Dirac chain.
  std::size_t sites = 7;
  /// Dirac intra-dimer coupling.
  double m = 1.0;
  /// Dirac inter-dimer scale.
  double g = 1.0;
  /// Uniform coupling.
  double c = 1.0;

  void validate() const {
    if (sites < 2) throw InvalidInput("a model chain needs at least 2 sites");
    if (tag == ModelTag::DiracOscillator && sites % 2 != 0) {
      throw InvalidInput("the Dirac chain is built from dimers and needs an even site count");
    }
    if (!(m > 0.0) || !(g > 0.0) || !(c > 0.0)) throw InvalidInput("model parameters m, g, c must be positive");
  }
};

/// finite oscillator: F_n = sqrt(n (N+1-n)) / 2 (the J_x matrix elements);
/// position chain: F_n = sqrt(n); Dirac: F_{2k-1} = m, F_{2k} = g sqrt(k);
/// uniform: F_n = c.
inline ChainCouplings model_couplings(const ModelKind& kind) {
  kind.validate();
  const std::size_t n = kind.sites - 1;
  std::vector<double> f(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto di = static_cast<double>(i);
    switch (kind.tag) {
      case ModelTag::FiniteOscillator: f[i - 1] = 0.5 * std::sqrt(di * static_cast<double>(n + 1 - i)); break;
      case ModelTag::PositionChain: f[i - 1] = std::sqrt(di); break;
      case ModelTag::DiracOscillator:
        f[i - 1] = i % 2 == 1 ? kind.m : kind.g * std::sqrt(static_cast<double>(i / 2));
        break;
      case ModelTag::Uniform: f[i - 1] = kind.c; break;
    }
  }
  return ChainCouplings(std::move(f));
}

struct ExpectedSpectrum {
  /// Short statement of the law the levels follow.
  std::string law;
  /// The levels; from eig_jacobi when `exact` is false.
  SymmetricSpectrum levels;
  bool exact = false;
};

inline ExpectedSpectrum expected_spectrum(const ModelKind& kind) {
  kind.validate();
  const std::size_t n = kind.sites - 1;
  switch (kind.tag) {
    case ModelTag::FiniteOscillator: {
      std::vector<double> e;
      for (std::size_t k = 0; k <= n; ++k) e.push_back(static_cast<double>(k) - 0.5 * static_cast<double>(n));
      return {"equispaced {-N/2, ..., N/2}", SymmetricSpectrum(std::move(e)), true};
    }
    case ModelTag::Uniform: {
      std::vector<double> e;
      for (std::size_t k = 1; k <= n + 1; ++k) {
        double v = 2.0 * kind.c * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n + 2));
        if (std::abs(v) < 1e-15 * kind.c) v = 0.0;
        e.push_back(v);
      }
      return {"2c cos(k pi / (N + 2))", SymmetricSpectrum(std::move(e), 1e-12), true};
    }
    case ModelTag::PositionChain:
      return {"sqrt(2) x Gauss-Hermite nodes of order N+1", eig_jacobi(model_couplings(kind)).spectrum, false};
    case ModelTag::DiracOscillator:
      return {"E^2 affine in level index over the lower half-band", eig_jacobi(model_couplings(kind)).spectrum,
              false};
  }
  throw InvalidInput("unknown model");
}

/// Least-squares line of E_k^2 against k over the lower half of the upper
/// half-band (ceil(M/2) levels for 2M sites, k = 0, 1, ...). Finite-size
/// effects bend the remaining levels away from the square-root law.
inline LinearFit square_root_law_fit(const SymmetricSpectrum& spectrum) {
  const auto upper = spectrum.positive_half();
  const std::size_t count = (upper.size() + 1) / 2;
  if (count < 2) throw InvalidInput("square-root fit needs at least 2 levels in the lower half-band");
  std::vector<double> k;
  std::vector<double> e2;
  for (std::size_t i = 0; i < count; ++i) {
    k.push_back(static_cast<double>(i));
    e2.push_back(upper[i] * upper[i]);
  }
  return fit_line(k, e2);
}

}  // namespace invlat
