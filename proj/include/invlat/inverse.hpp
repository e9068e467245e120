#pragma once

// Inverse spectral problem: couplings from a symmetric target spectrum.
//
// Unknowns are the squared couplings x_n = F_n^2, in which the coefficient
// equations are polynomial. Of the N+2 coefficients only the orders j with
// N - j odd (and j <= N - 1) carry information; the rest vanish identically
// or are fixed by monicity. That leaves floor((N+1)/2) equations, so
// floor(N/2) couplings must be pinned to select a point of the surface.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "invlat/chain.hpp"
#include "invlat/charpoly.hpp"
#include "invlat/error.hpp"
#include "invlat/rng.hpp"
#include "invlat/tridiagonal.hpp"

namespace invlat {

/// Orders j in [0, N-1] with N - j odd, ascending.
inline std::vector<std::size_t> active_orders(std::size_t chain_index) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < chain_index; ++j) {
    if ((chain_index - j) % 2 == 1) out.push_back(j);
  }
  return out;
}

/// Number of couplings that must be pinned: floor(N/2).
inline std::size_t pin_count(std::size_t chain_index) { return chain_index / 2; }

namespace detail {

// Coefficients of the chain polynomial in terms of x = F^2.
inline std::vector<double> coeffs_from_squares(std::span<const double> x) {
  std::vector<double> older{1.0};
  std::vector<double> prev{0.0, 1.0};
  for (double xn : x) {
    std::vector<double> next(prev.size() + 1, 0.0);
    for (std::size_t j = 1; j < next.size(); ++j) next[j] = prev[j - 1];
    for (std::size_t j = 0; j < older.size(); ++j) next[j] -= xn * older[j];
    older = std::move(prev);
    prev = std::move(next);
  }
  return prev;
}

inline void check_squares(std::span<const double> x, const SymmetricSpectrum& target) {
  if (x.size() + 1 != target.size()) {
    throw DimensionMismatch("chain with " + std::to_string(x.size() + 1) + " sites vs target of " +
                            std::to_string(target.size()) + " levels");
  }
}

}  // namespace detail

/// Lambda_chain(x) - Lambda_target restricted to the active orders.
inline Eigen::VectorXd residual(std::span<const double> squared_couplings, const SymmetricSpectrum& target) {
  detail::check_squares(squared_couplings, target);
  const auto chain = detail::coeffs_from_squares(squared_couplings);
  const auto goal = esp_from_spectrum(target);
  const auto rows = active_orders(squared_couplings.size());
  Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r(static_cast<Eigen::Index>(i)) = chain[rows[i]] - goal[rows[i]];
  }
  return r;
}

/// d(residual)_i / d x_m for every active order i and every coupling m, by
/// differentiating the size recurrence alongside it:
///   dP_k = lambda dP_{k-1} - x_k dP_{k-2} - [k == m] P_{k-2}.
inline Eigen::MatrixXd residual_jacobian(std::span<const double> squared_couplings,
                                         const SymmetricSpectrum& target) {
  detail::check_squares(squared_couplings, target);
  const std::size_t n = squared_couplings.size();
  const std::size_t len = n + 2;
  // P_{k} padded to full length; dP[m] likewise
  std::vector<double> p_older(len, 0.0);
  std::vector<double> p_prev(len, 0.0);
  p_older[0] = 1.0;
  p_prev[1] = 1.0;
  std::vector<std::vector<double>> d_older(n, std::vector<double>(len, 0.0));
  std::vector<std::vector<double>> d_prev(n, std::vector<double>(len, 0.0));

  for (std::size_t k = 0; k < n; ++k) {
    const double xk = squared_couplings[k];
    std::vector<double> p_next(len, 0.0);
    for (std::size_t j = 1; j < len; ++j) p_next[j] = p_prev[j - 1];
    for (std::size_t j = 0; j < len; ++j) p_next[j] -= xk * p_older[j];

    std::vector<std::vector<double>> d_next(n, std::vector<double>(len, 0.0));
    for (std::size_t m = 0; m <= k; ++m) {
      auto& dn = d_next[m];
      for (std::size_t j = 1; j < len; ++j) dn[j] = d_prev[m][j - 1];
      for (std::size_t j = 0; j < len; ++j) dn[j] -= xk * d_older[m][j];
      if (m == k) {
        for (std::size_t j = 0; j < len; ++j) dn[j] -= p_older[j];
      }
    }
    p_older = std::move(p_prev);
    p_prev = std::move(p_next);
    d_older = std::move(d_prev);
    d_prev = std::move(d_next);
  }

  const auto rows = active_orders(n);
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = d_prev[m][rows[i]];
    }
  }
  return jac;
}

/// Target spectrum plus the pinned couplings that select one solution.
struct InverseProblem {
  SymmetricSpectrum target;
  /// 1-based coupling index -> fixed positive value of F_n.
  std::map<std::size_t, double> pins;
  std::optional<ChainCouplings> initial_guess;
  std::uint64_t seed = kDefaultSeed;
  double tolerance = 1e-12;
  int max_iterations = 200;
  int max_restarts = 50;

  void validate() const {
    const std::size_t n = target.order();
    if (pins.size() != pin_count(n)) {
      throw InvalidInput("expected exactly " + std::to_string(pin_count(n)) + " pinned couplings for N = " +
                         std::to_string(n) + ", got " + std::to_string(pins.size()));
    }
    for (const auto& [idx, value] : pins) {
      if (idx < 1 || idx > n) {
        throw InvalidInput("pin index " + std::to_string(idx) + " outside 1.." + std::to_string(n));
      }
      if (!std::isfinite(value) || !(value > 0.0)) {
        throw InvalidInput("pin F_" + std::to_string(idx) + " must be positive");
      }
    }
    if (initial_guess && initial_guess->size() != n) {
      throw DimensionMismatch("initial guess has wrong length");
    }
    if (!(tolerance > 0.0) || max_iterations < 1 || max_restarts < 0) {
      throw InvalidInput("solver controls must be positive");
    }
  }
};

struct SolveResult {
  ChainCouplings couplings;
  /// Euclidean norm of the residual for the target rescaled to max|E| = 1,
  /// each order divided by max(1, e_{N+1-j}(|E|)).
  double residual_norm = 0.0;
  int iterations = 0;
  int restarts_used = 0;
};

namespace detail {

struct NewtonOutcome {
  std::vector<double> x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// 1 / max(1, e_{N+1-j}(|E|)) for each active order j. For long chains the
// coefficients grow combinatorially and an absolute tolerance falls below
// their round-off; those rows are measured relative to that size instead.
inline Eigen::VectorXd row_weights(const SymmetricSpectrum& target) {
  std::vector<double> e{1.0};
  for (double level : target.values()) {
    e.push_back(0.0);
    for (std::size_t k = e.size() - 1; k > 0; --k) e[k] += std::abs(level) * e[k - 1];
  }
  const std::size_t sites = target.size();
  const auto rows = active_orders(sites - 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = 1.0 / std::max(e[sites - rows[i]], 1.0);
  }
  return w;
}

// Damped Newton on the free squared couplings, in normalised units. The
// step is invariant under row scaling; `weighted_merit` picks the norm the
// line search decreases. Convergence is always judged on the weighted norm.
inline NewtonOutcome newton_run(std::vector<double> x, const std::vector<std::size_t>& free,
                                const SymmetricSpectrum& target, double tol, int max_iterations,
                                bool weighted_merit) {
  NewtonOutcome out;
  const Eigen::VectorXd w = row_weights(target);
  auto norms_at = [&](const std::vector<double>& xs) {
    const Eigen::VectorXd r = residual(xs, target);
    return std::pair{r.norm(), r.cwiseProduct(w).norm()};
  };
  auto [plain, current] = norms_at(x);
  out.x = x;
  out.residual = current;
  const auto cols = static_cast<Eigen::Index>(free.size());

  // a few extra steps once below tolerance; near folds of the surface the
  // convergence is only linear and these steps buy several digits in x
  int polish = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    if (current <= tol) {
      out.converged = true;
      if (current == 0.0 || ++polish > 4) return out;
    }
    const Eigen::VectorXd r = residual(x, target).cwiseProduct(w);
    const Eigen::MatrixXd full = w.asDiagonal() * residual_jacobian(x, target);
    Eigen::MatrixXd jac(full.rows(), cols);
    for (Eigen::Index c = 0; c < cols; ++c) jac.col(c) = full.col(static_cast<Eigen::Index>(free[c]));

    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return out;
    const Eigen::VectorXd step = lu.solve(-r);
    if (!step.allFinite()) return out;

    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial(x);
    for (int halving = 0; halving <= 40; ++halving, t *= 0.5) {
      bool positive = true;
      for (Eigen::Index c = 0; c < cols; ++c) {
        const std::size_t idx = free[c];
        trial[idx] = x[idx] + t * step(c);
        if (!(trial[idx] > 0.0)) positive = false;
      }
      if (!positive) continue;
      const auto [cand_plain, cand] = norms_at(trial);
      const double factor = 1.0 - 1e-4 * t;
      if (weighted_merit ? cand < factor * current : cand_plain < factor * plain) {
        x = trial;
        plain = cand_plain;
        current = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stagnation, or round-off floor while polishing
    out.x = x;
    out.residual = current;
  }
  out.converged = out.residual <= tol;
  return out;
}

}  // namespace detail

/// Couplings reproducing `problem.target` with the pinned entries held fixed.
///
/// The target is rescaled to max|E| = 1 internally so the tolerance is
/// scale free. Restarts draw the free x_n log-uniformly in
/// [1e-2 rho^2, rho^2] and alternate the line-search merit between the
/// weighted and the plain residual norm.
inline SolveResult newton_solve(const InverseProblem& problem) {
  problem.validate();
  const SymmetricSpectrum& target = problem.target;
  const std::size_t n = target.order();
  if (n == 0) return {ChainCouplings{}, 0.0, 0, 0};

  const double rho = target.radius();
  if (!(rho > 0.0)) throw DegenerateTarget("target spectrum is identically zero");

  std::vector<double> unit_levels(target.values().begin(), target.values().end());
  for (auto& e : unit_levels) e /= rho;
  const SymmetricSpectrum unit(unit_levels, 1e-6);

  // trace budget: sum_n F_n^2 = sum_k E_k^2 / 2
  double budget = 0.0;
  for (double e : unit_levels) budget += 0.5 * e * e;
  double pinned = 0.0;
  std::vector<double> x0(n, 0.0);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = problem.pins.find(i + 1);
    if (it != problem.pins.end()) {
      x0[i] = (it->second / rho) * (it->second / rho);
      pinned += x0[i];
    } else {
      free.push_back(i);
    }
  }
  if (pinned >= budget) {
    throw InfeasiblePins("pinned couplings exceed the trace budget sum F^2 = sum E^2 / 2", pinned - budget);
  }

  Rng rng = make_stream(problem.seed, "newton_solve");
  double best = std::numeric_limits<double>::infinity();
  double floor_min = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int attempt = 0; attempt <= problem.max_restarts; ++attempt) {
    std::vector<double> x = x0;
    if (attempt == 0 && problem.initial_guess) {
      for (std::size_t i : free) x[i] = std::pow((*problem.initial_guess)[i] / rho, 2);
    } else {
      for (std::size_t i : free) x[i] = log_uniform(rng, 1e-2, 1.0);
    }
    auto run = detail::newton_run(std::move(x), free, unit, problem.tolerance, problem.max_iterations,
                                attempt % 2 == 0);
    total_iterations += run.iterations;
    best = std::min(best, run.residual);
    floor_min = std::min(floor_min, run.residual);
    if (run.converged) {
      std::vector<double> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = rho * std::sqrt(run.x[i]);
      for (const auto& [idx, value] : problem.pins) f[idx - 1] = value;
      return {ChainCouplings(std::move(f)), run.residual, total_iterations, attempt};
    }
  }
  // every restart stalled well away from zero: the pins are (very likely)
  // incompatible with the target
  if (floor_min > 1e-6) {
    throw InfeasiblePins("no restart approached the isospectral surface; residual floor " +
                             std::to_string(floor_min),
                         floor_min);
  }
  throw NoConvergence("Newton iteration did not reach tolerance within " +
                          std::to_string(problem.max_restarts) + " restarts",
                      best);
}

/// max_k |E_k(chain) - target_k| / max|target|, both sorted ascending.
inline double spectral_mismatch(const ChainCouplings& couplings, const SymmetricSpectrum& target) {
  const auto es = eig_jacobi(couplings);
  double worst = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    worst = std::max(worst, std::abs(es.spectrum[k] - target[k]));
  }
  const double rho = target.radius();
  return rho > 0.0 ? worst / rho : worst;
}

/// Zero-diagonal chain with spectrum `target` whose eigenvectors have first
/// components proportional to `amplitudes` (one per level, ascending
/// energy). Lanczos tridiagonalisation of diag(E) from that start vector,
/// with full reorthogonalisation. Mirror-symmetric amplitudes
/// (a_k = a_{n-1-k}) make every diagonal entry vanish; the squared couplings
/// then parametrise the whole isospectral surface.
inline ChainCouplings jacobi_from_weights(const SymmetricSpectrum& target, std::span<const double> amplitudes) {
  const auto n = static_cast<Eigen::Index>(target.size());
  if (amplitudes.size() != target.size()) throw DimensionMismatch("one amplitude per level required");
  Eigen::VectorXd q0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = amplitudes[static_cast<std::size_t>(i)];
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("amplitudes must be positive");
    const double mirror = amplitudes[static_cast<std::size_t>(n - 1 - i)];
    if (std::abs(a - mirror) > 1e-12 * std::max(a, mirror)) throw InvalidInput("amplitudes must be mirror symmetric");
    q0(i) = a;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(target[static_cast<std::size_t>(i)] > target[static_cast<std::size_t>(i - 1)])) {
      throw DegenerateTarget("a chain spectrum must be simple; repeated level " +
                             std::to_string(target[static_cast<std::size_t>(i)]));
    }
  }
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = target[static_cast<std::size_t>(i)];
  Eigen::MatrixXd q(n, n);
  q.col(0) = q0.normalized();
  std::vector<double> beta;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Eigen::VectorXd v = e.cwiseProduct(q.col(k));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j <= k; ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    beta.push_back(v.norm());
    q.col(k + 1) = v / beta.back();
  }
  return ChainCouplings(std::move(beta));
}

struct SurfaceSamples {
  std::vector<ChainCouplings> samples;
  /// Samples for which no attempt produced a validated solution.
  std::size_t skipped = 0;
};

/// Random-point controls for `sample_surface`. Eigenvector amplitudes are the
/// first components of the uniform chain, sin(k pi / (N + 2)), each scaled
/// by a factor drawn log-uniformly in [lower, upper] and mirrored.
struct SurfaceDraw {
  double lower = 0.9;
  double upper = 1.0;
  int attempts = 5;
  int restarts_per_attempt = 10;
};

/// `count` random points of the isospectral surface of `target`.
///
/// Each sample draws a random surface point from random eigenvector
/// amplitudes (`jacobi_from_weights`), pins floor(N/2) randomly chosen
/// couplings at that point's values and solves the square coefficient
/// system for the rest with `newton_solve`. Pins obtained this way are
/// feasible by construction; independent random pin values mostly are not
/// once the target has closely spaced levels. Every returned sample is
/// forward-validated to 1e-8 max|E|.
inline SurfaceSamples sample_surface(const SymmetricSpectrum& target, std::size_t count, std::uint64_t seed,
                                     const SurfaceDraw& draw = {}) {
  if (count < 1) throw InvalidInput("sample count must be at least 1");
  if (!(draw.lower > 0.0) || !(draw.upper >= draw.lower)) {
    throw InvalidInput("amplitude bounds must satisfy 0 < lower <= upper");
  }
  const std::size_t n = target.order();
  const double rho = target.radius();
  SurfaceSamples out;
  if (n == 0) {
    out.samples.assign(count, ChainCouplings{});
    return out;
  }
  if (!(rho > 0.0)) throw DegenerateTarget("target spectrum is identically zero");
  const std::size_t sites = n + 1;

  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = make_stream(seed, "sample_surface", s);
    bool done = false;
    for (int attempt = 0; attempt < draw.attempts && !done; ++attempt) {
      std::vector<double> amp(sites);
      auto profile = [&](std::size_t i) {
        return std::sin(static_cast<double>(i + 1) * std::numbers::pi / static_cast<double>(sites + 1));
      };
      for (std::size_t i = 0; i < sites / 2; ++i) {
        amp[i] = amp[sites - 1 - i] = profile(i) * log_uniform(rng, draw.lower, draw.upper);
      }
      if (sites % 2 == 1) amp[sites / 2] = profile(sites / 2) * log_uniform(rng, draw.lower, draw.upper);
      const ChainCouplings point = jacobi_from_weights(target, amp);

      std::vector<std::size_t> indices(n);
      for (std::size_t i = 0; i < n; ++i) indices[i] = i + 1;
      std::shuffle(indices.begin(), indices.end(), rng);
      InverseProblem problem{target, {}, point, rng(), 1e-12, 200, draw.restarts_per_attempt};
      for (std::size_t p = 0; p < pin_count(n); ++p) problem.pins[indices[p]] = point[indices[p] - 1];
      try {
        auto result = newton_solve(problem);
        if (spectral_mismatch(result.couplings, target) <= 1e-8) {
          out.samples.push_back(std::move(result.couplings));
          done = true;
        }
      } catch (const InfeasiblePins&) {
      } catch (const NoConvergence&) {
      }
    }
    if (!done) ++out.skipped;
  }
  if (2 * out.skipped > count) {
    throw NoConvergence("more than half of the surface samples failed (" + std::to_string(out.skipped) + " of " +
                            std::to_string(count) + ")",
                        std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

/// Couplings from one known eigenpair.
///
/// For E != 0 the three-term recurrence is solved forward,
///   F_n = (phi_n / phi_{n+1}) E - (phi_{n-1} / phi_{n+1}) F_{n-1},
/// and the result is unique. For E = 0 (N even) the mode vanishes on even
/// sites and only the ratios F_{2k} / F_{2k-1} = -phi_{2k-1} / phi_{2k+1} are
/// fixed; `scales` supplies F_{2k-1} for each pair (one value is broadcast).
inline ChainCouplings reconstruct_from_eigenpair(std::span<const double> vector, double energy,
                                                 std::span<const double> scales = {},
                                                 double tolerance = 1e-8) {
  const std::size_t sites = vector.size();
  if (sites == 0) throw InvalidInput("eigenvector is empty");
  const std::size_t n = sites - 1;
  if (n == 0) return {};
  double amax = 0.0;
  for (double v : vector) amax = std::max(amax, std::abs(v));
  if (!(amax > 0.0)) throw InvalidInput("eigenvector is identically zero");
  const double vanish = 1e-12 * amax;

  std::vector<double> f(n);
  if (energy != 0.0) {
    double prev_f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {  // F_{i+1}
      const double next = vector[i + 1];
      if (std::abs(next) <= vanish) {
        throw ZeroDivision("eigenvector component phi_" + std::to_string(i + 2) + " vanishes", i + 2);
      }
      const double before = i == 0 ? 0.0 : vector[i - 1];
      f[i] = (vector[i] / next) * energy - (before / next) * prev_f;
      prev_f = f[i];
    }
    const double last = energy * vector[n] - f[n - 1] * vector[n - 1];
    const double scale = std::max(std::abs(energy), *std::max_element(f.begin(), f.end())) * amax;
    if (std::abs(last) > tolerance * scale) {
      throw NotAnEigenvector("recurrence fails at the last site (residual " + std::to_string(std::abs(last)) + ")");
    }
  } else {
    if (n % 2 == 1) throw NotAnEigenvector("an even-length chain has no zero mode");
    const std::size_t pairs = n / 2;
    if (scales.size() != 1 && scales.size() != pairs) {
      throw InvalidInput("zero-energy reconstruction needs 1 or " + std::to_string(pairs) + " scales");
    }
    for (std::size_t site = 2; site <= sites; site += 2) {
      if (std::abs(vector[site - 1]) > tolerance * amax) {
        throw NotAnEigenvector("zero mode must vanish on even site " + std::to_string(site));
      }
    }
    for (std::size_t k = 1; k <= pairs; ++k) {
      const double odd_before = vector[2 * k - 2];  // phi_{2k-1}
      const double odd_after = vector[2 * k];       // phi_{2k+1}
      if (std::abs(odd_after) <= vanish) {
        throw ZeroDivision("eigenvector component phi_" + std::to_string(2 * k + 1) + " vanishes", 2 * k + 1);
      }
      const double scale = scales.size() == 1 ? scales[0] : scales[k - 1];
      f[2 * k - 2] = scale;
      f[2 * k - 1] = -(odd_before / odd_after) * scale;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f[i] > 0.0)) {
      throw NotAnEigenvector("reconstructed coupling F_" + std::to_string(i + 1) + " is not positive");
    }
  }
  return ChainCouplings(std::move(f));
}

}  // namespace invlat
