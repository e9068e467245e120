#pragma once

// Random symmetric target spectra and the pooled distribution of the
// couplings that realise them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "invlat/chain.hpp"
#include "invlat/error.hpp"
#include "invlat/inverse.hpp"
#include "invlat/rng.hpp"

namespace invlat {

enum class EnsembleKind { CosineBand, GaussianBand };

inline std::string to_string(EnsembleKind k) { return k == EnsembleKind::CosineBand ? "cosine" : "gaussian"; }

inline EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "cosine") return EnsembleKind::CosineBand;
  if (s == "gaussian") return EnsembleKind::GaussianBand;
  throw InvalidInput("unknown ensemble kind '" + s + "' (expected cosine or gaussian)");
}

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::CosineBand;
  std::size_t sites = 12;
  /// Half-normal width of the gaussian band.
  double sigma = 0.25;
  std::size_t trials = 500;
  std::uint64_t seed = kDefaultSeed;
  /// Odd bin counts over [0, 1] centre a bin on F = 1/2.
  std::size_t bins = 15;
  /// Upper histogram edge; 0 means the largest pooled coupling.
  double range_max = 1.0;
  SurfaceDraw draw{};

  void validate() const {
    if (sites < 2) throw InvalidInput("ensemble needs at least 2 levels");
    if (trials < 1) throw InvalidInput("ensemble needs at least 1 trial");
    if (bins < 1) throw InvalidInput("histogram needs at least 1 bin");
    if (kind == EnsembleKind::GaussianBand && !(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    if (range_max < 0.0) throw InvalidInput("range_max must be non-negative");
    if (!(draw.lower > 0.0) || !(draw.upper >= draw.lower)) throw InvalidInput("amplitude bounds must satisfy 0 < lower <= upper");
  }
};

/// One random target. Cosine band: E = cos(theta), theta uniform on
/// (0, pi/2), i.e. the arcsine density of a unit-amplitude dispersion 2F cos k
/// with F = 1/2. Gaussian band: E = |z| sigma with z standard normal. Positive
/// draws are mirrored and a zero is added for an odd level count.
inline SymmetricSpectrum random_spectrum(const EnsembleSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> levels;
  const std::size_t half = spec.sites / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double e = 0.0;
    while (!(e > 0.0)) {
      if (spec.kind == EnsembleKind::CosineBand) {
        e = std::cos(uniform(rng, 0.0, 0.5 * std::numbers::pi));
      } else {
        e = std::abs(std::normal_distribution<double>(0.0, spec.sigma)(rng));
      }
    }
    levels.push_back(e);
    levels.push_back(-e);
  }
  if (spec.sites % 2 == 1) levels.push_back(0.0);
  return SymmetricSpectrum(std::move(levels), 0.0);
}

inline SymmetricSpectrum random_spectrum(const EnsembleSpec& spec) {
  Rng rng = make_stream(spec.seed, "random_spectrum");
  return random_spectrum(spec, rng);
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 values
  std::vector<std::size_t> counts;

  double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

struct CouplingDistribution {
  Histogram histogram;
  double mean = 0.0;
  double stddev = 0.0;
  /// Centre of the most populated bin (lowest such bin on ties).
  double mode = 0.0;
  std::size_t pooled = 0;
  std::size_t skipped_trials = 0;
};

/// Histogram over [lo, hi] with the top edge closed.
inline Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidInput("histogram needs bins >= 1 and hi > lo");
  Histogram h;
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  h.counts.assign(bins, 0);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(i, bins - 1)] += 1;
  }
  return h;
}

/// Runs `spec.trials` independent spectrum -> surface-sample pipelines and
/// pools the couplings. Trial t uses its own streams derived from (seed, t),
/// so the result does not depend on `threads`.
inline CouplingDistribution coupling_distribution(const EnsembleSpec& spec, unsigned threads = 1) {
  spec.validate();
  std::vector<std::vector<double>> per_trial(spec.trials);
  std::vector<char> failed(spec.trials, 0);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t t = begin; t < spec.trials; t += stride) {
      Rng rng = make_stream(spec.seed, "ensemble.spectrum", t);
      const auto target = random_spectrum(spec, rng);
      try {
        const auto s = sample_surface(target, 1, splitmix64(spec.seed ^ t), spec.draw);
        const auto v = s.samples.front().values();
        per_trial[t].assign(v.begin(), v.end());
      } catch (const NoConvergence&) {
        failed[t] = 1;
      }
    }
  };
  const unsigned nthreads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(spec.trials)));
  if (nthreads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(work, i, nthreads);
    for (auto& th : pool) th.join();
  }

  CouplingDistribution out;
  std::vector<double> pooled;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    if (failed[t]) ++out.skipped_trials;
    pooled.insert(pooled.end(), per_trial[t].begin(), per_trial[t].end());
  }
  if (2 * out.skipped_trials > spec.trials) {
    throw NoConvergence("more than half of the ensemble trials failed (" + std::to_string(out.skipped_trials) +
                            " of " + std::to_string(spec.trials) + ")",
                        std::numeric_limits<double>::quiet_NaN());
  }
  out.pooled = pooled.size();
  double sum = 0.0;
  for (double v : pooled) sum += v;
  out.mean = sum / static_cast<double>(pooled.size());
  double ss = 0.0;
  for (double v : pooled) ss += (v - out.mean) * (v - out.mean);
  out.stddev = pooled.size() > 1 ? std::sqrt(ss / static_cast<double>(pooled.size() - 1)) : 0.0;

  double hi = spec.range_max;
  if (hi == 0.0) hi = *std::max_element(pooled.begin(), pooled.end());
  if (!(hi > 0.0)) hi = 1.0;
  out.histogram = make_histogram(pooled, spec.bins, 0.0, hi);
  const auto peak = std::max_element(out.histogram.counts.begin(), out.histogram.counts.end());
  out.mode = out.histogram.bin_center(static_cast<std::size_t>(peak - out.histogram.counts.begin()));
  return out;
}

}  // namespace invlat
