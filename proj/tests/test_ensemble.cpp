#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "invlat/ensemble.hpp"

using namespace invlat;

TEST(RandomSpectrum, ShapeAndSymmetry) {
  for (auto kind : {EnsembleKind::CosineBand, EnsembleKind::GaussianBand}) {
    for (std::size_t sites : {2, 5, 12}) {
      EnsembleSpec spec;
      spec.kind = kind;
      spec.sites = sites;
      const auto s = random_spectrum(spec);
      ASSERT_EQ(s.size(), sites);
      for (std::size_t i = 0; i < sites; ++i) EXPECT_EQ(s[i], -s[sites - 1 - i]);
      if (sites % 2 == 1) {
        EXPECT_EQ(s[sites / 2], 0.0);
      }
      if (kind == EnsembleKind::CosineBand) {
        EXPECT_LE(s.radius(), 1.0);
      }
    }
  }
}

TEST(RandomSpectrum, DeterministicPerSeed) {
  EnsembleSpec spec;
  spec.seed = 5;
  const auto a = random_spectrum(spec);
  const auto b = random_spectrum(spec);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  spec.seed = 6;
  const auto c = random_spectrum(spec);
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(RandomSpectrum, CosineFollowsArcsineLaw) {
  // P(E <= e) = 1 - acos(e) / (pi / 2) on (0, 1)
  EnsembleSpec spec;
  spec.sites = 2;
  Rng rng = make_stream(17, "arcsine");
  std::vector<double> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(random_spectrum(spec, rng)[1]);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = 1.0 - std::acos(draws[i]) / (0.5 * std::numbers::pi);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 0.02);
}

TEST(RandomSpectrum, GaussianHalfNormalMoments) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::GaussianBand;
  spec.sites = 2;
  spec.sigma = 0.3;
  Rng rng = make_stream(18, "halfnormal");
  double sum = 0.0;
  double sq = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const double e = random_spectrum(spec, rng)[1];
    sum += e;
    sq += e * e;
  }
  EXPECT_NEAR(sum / draws, 0.3 * std::sqrt(2.0 / std::numbers::pi), 0.005);
  EXPECT_NEAR(sq / draws, 0.09, 0.003);
}

TEST(Histogram, Binning) {
  const auto h = make_histogram({0.0, 0.1, 0.5, 0.99, 1.0, 1.2, -0.1}, 2, 0.0, 1.0);
  ASSERT_EQ(h.edges.size(), 3u);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 3}));
  EXPECT_DOUBLE_EQ(h.bin_center(0), 0.25);
  EXPECT_THROW(make_histogram({}, 0, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(make_histogram({}, 3, 1.0, 1.0), InvalidInput);
}

TEST(CouplingDistribution, SingleTrialTwoLevels) {
  // N + 1 = 2: the only coupling equals the positive level
  EnsembleSpec spec;
  spec.sites = 2;
  spec.trials = 1;
  spec.bins = 1;
  const auto d = coupling_distribution(spec);
  EXPECT_EQ(d.pooled, 1u);
  EXPECT_EQ(d.histogram.counts, std::vector<std::size_t>{1});
  EXPECT_DOUBLE_EQ(d.mode, 0.5);
  Rng rng = make_stream(spec.seed, "ensemble.spectrum", 0);
  EXPECT_NEAR(d.mean, random_spectrum(spec, rng)[1], 1e-12);
  EXPECT_EQ(d.stddev, 0.0);
}

TEST(CouplingDistribution, IndependentOfThreadCount) {
  EnsembleSpec spec;
  spec.trials = 40;
  const auto a = coupling_distribution(spec, 1);
  const auto b = coupling_distribution(spec, 4);
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  EXPECT_EQ(a.skipped_trials, b.skipped_trials);
}

TEST(CouplingDistribution, PooledCountAndRange) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::GaussianBand;
  spec.trials = 30;
  spec.range_max = 0.0;
  const auto d = coupling_distribution(spec);
  EXPECT_EQ(d.pooled, (spec.trials - d.skipped_trials) * (spec.sites - 1));
  std::size_t total = 0;
  for (auto c : d.histogram.counts) total += c;
  EXPECT_EQ(total, d.pooled);
  EXPECT_GT(d.mean, 0.0);
}

TEST(EnsembleSpec, Validation) {
  EnsembleSpec spec;
  spec.sites = 1;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = {};
  spec.kind = EnsembleKind::GaussianBand;
  spec.sigma = 0.0;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = {};
  spec.trials = 0;
  EXPECT_THROW(spec.validate(), InvalidInput);
  EXPECT_THROW(ensemble_kind_from_string("lorentzian"), InvalidInput);
  EXPECT_EQ(ensemble_kind_from_string("gaussian"), EnsembleKind::GaussianBand);
}
