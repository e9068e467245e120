#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "invlat/charpoly.hpp"
#include "invlat/gauge.hpp"
#include "invlat/tridiagonal.hpp"
#include "oracles.hpp"

using namespace invlat;

namespace {

std::vector<double> values_of(const SymmetricSpectrum& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST(EigJacobi, TwoCouplingUnitChain) {
  const auto es = eig_jacobi(ChainCouplings({1.0, 1.0}));
  ASSERT_EQ(es.spectrum.size(), 3u);
  EXPECT_NEAR(es.spectrum[0], -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(es.spectrum[1], 0.0, 1e-12);
  EXPECT_NEAR(es.spectrum[2], std::sqrt(2.0), 1e-12);
}

TEST(EigJacobi, SingleSite) {
  const auto es = eig_jacobi(ChainCouplings{});
  ASSERT_EQ(es.spectrum.size(), 1u);
  EXPECT_EQ(es.spectrum[0], 0.0);
  EXPECT_NEAR(std::abs(es.vectors(0, 0)), 1.0, 1e-15);
}

TEST(EigJacobi, GoldenRatioLevels) {
  const auto es = eig_jacobi(ChainCouplings({1.0, 1.0, 1.0}));
  const double a = 2.0 * std::cos(std::numbers::pi / 5.0);
  const double b = 2.0 * std::cos(2.0 * std::numbers::pi / 5.0);
  const std::vector<double> expected{-a, -b, b, a};
  EXPECT_LT(oracle::max_abs_diff(values_of(es.spectrum), expected), 1e-12);
  EXPECT_NEAR(a, 1.6180339887, 1e-9);
}

TEST(EigJacobi, EigenpairsSatisfyRecurrenceAndOrthonormality) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 15);
    const auto es = eig_jacobi(f);
    const Eigen::MatrixXd h = hamiltonian(f);
    const double scale = es.spectrum.radius();
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
      const Eigen::VectorXd v = es.vectors.col(k);
      EXPECT_LE((h * v - es.spectrum[static_cast<std::size_t>(k)] * v).cwiseAbs().maxCoeff(), 1e-10 * scale);
    }
    const auto n = es.vectors.cols();
    EXPECT_LE((es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(oracle::max_abs_diff(values_of(es.spectrum), oracle::dense_spectrum(f)), 1e-10 * scale);
  }
}

TEST(EigJacobi, BisectionAgreesWithQl) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 20);
    const auto ql = eig_jacobi(f);
    const auto bis = eig_jacobi_bisection(f);
    EXPECT_LT(oracle::max_abs_diff(values_of(ql.spectrum), bis), 1e-11);
  }
}

TEST(HomogeneousEigensystem, SmallCases) {
  const auto one = homogeneous_eigensystem(1);
  EXPECT_NEAR(one.spectrum[0], -1.0, 1e-15);
  EXPECT_NEAR(one.spectrum[1], 1.0, 1e-15);
  EXPECT_NEAR(std::abs(one.vectors(0, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(one.vectors(0, 0), -one.vectors(1, 0), 1e-15);
  EXPECT_NEAR(one.vectors(0, 1), one.vectors(1, 1), 1e-15);

  const auto two = homogeneous_eigensystem(2);
  EXPECT_NEAR(two.spectrum[0], -std::sqrt(2.0), 1e-14);
  EXPECT_EQ(two.spectrum[1], 0.0);
}

TEST(HomogeneousEigensystem, AgreesWithQlOnUnitChains) {
  for (std::size_t n = 0; n <= 25; ++n) {
    const auto closed = homogeneous_eigensystem(n);
    const auto numeric = eig_jacobi(ChainCouplings(std::vector<double>(n, 1.0)));
    EXPECT_LT(oracle::max_abs_diff(values_of(closed.spectrum), values_of(numeric.spectrum)), 1e-10);
    // same eigenvectors up to sign
    for (Eigen::Index k = 0; k < closed.vectors.cols(); ++k) {
      const double overlap = std::abs(closed.vectors.col(k).dot(numeric.vectors.col(k)));
      EXPECT_NEAR(overlap, 1.0, 1e-10);
    }
  }
}

TEST(CharPoly, UnitPair) {
  const auto p = charpoly_coeffs(ChainCouplings({1.0, 1.0}));
  ASSERT_EQ(p.coeffs.size(), 4u);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], -2.0);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(p[3], 1.0);
}

TEST(CharPoly, SingleSite) {
  const auto p = charpoly_coeffs(ChainCouplings{});
  ASSERT_EQ(p.coeffs.size(), 2u);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
}

TEST(CharPoly, MatchesExpandedDenseSpectrum) {
  const ChainCouplings f({1.0, 2.0, 3.0});
  const auto p = charpoly_coeffs(f);
  const auto expanded = oracle::subset_expansion(oracle::dense_spectrum(f));
  for (std::size_t j = 0; j < expanded.size(); ++j) EXPECT_NEAR(p[j], expanded[j], 1e-10) << j;
}

TEST(CharPoly, AgreesWithDeterminant) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 8);
    const auto p = charpoly_coeffs(f);
    for (double lambda : {-1.7, -0.3, 0.4, 2.2}) {
      const double det = oracle::dense_det(f, lambda);
      EXPECT_NEAR(charpoly_eval(p, lambda), det, 1e-10 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST(CharPoly, ConstantTermClosedForm) {
  EXPECT_DOUBLE_EQ(charpoly_constant_term(ChainCouplings({3.0})), -9.0);
  EXPECT_DOUBLE_EQ(charpoly_constant_term(ChainCouplings({2.0, 5.0, 3.0})), 36.0);
  EXPECT_EQ(charpoly_constant_term(ChainCouplings({2.0, 5.0})), 0.0);
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 11);
    const double expected = charpoly_coeffs(f)[0];
    EXPECT_NEAR(charpoly_constant_term(f), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(CharPolyClosed, UnitPairOrderOne) {
  EXPECT_DOUBLE_EQ(charpoly_coeffs_closed(ChainCouplings({1.0, 1.0}), 1), -2.0);
}

TEST(CharPolyClosed, ParityBranchIsExactZero) {
  const ChainCouplings f({0.7, 1.3, 0.9, 2.1});
  for (std::size_t j = 0; j <= 4; j += 2) EXPECT_EQ(charpoly_coeffs_closed(f, j), 0.0);
  EXPECT_EQ(charpoly_coeffs_closed(f, 5), 1.0);
}

TEST(CharPolyClosed, MatchesRecurrenceForFourCouplings) {
  const ChainCouplings f({1.0, 2.0, 3.0, 4.0});
  const auto p = charpoly_coeffs(f);
  for (std::size_t j = 0; j <= 5; ++j) EXPECT_NEAR(charpoly_coeffs_closed(f, j), p[j], 1e-9 * std::max(1.0, std::abs(p[j])));
}

TEST(CharPolyClosed, RejectsLongChains) {
  const ChainCouplings f(std::vector<double>(13, 1.0));
  EXPECT_THROW(charpoly_coeffs_closed(f, 0), SizeLimit);
  EXPECT_NO_THROW(charpoly_coeffs_closed(f, 0, 13));
}

TEST(EspFromSpectrum, HandExpansions) {
  const auto a = esp_from_spectrum(SymmetricSpectrum({-1.0, 0.0, 1.0}));
  EXPECT_EQ(a.coeffs, (std::vector<double>{0.0, -1.0, 0.0, 1.0}));
  const auto b = esp_from_spectrum(SymmetricSpectrum({-std::sqrt(2.0), 0.0, std::sqrt(2.0)}));
  EXPECT_NEAR(b[1], -2.0, 1e-15);
  const auto c = esp_from_spectrum(SymmetricSpectrum({-2.0, -1.0, 1.0, 2.0}));
  EXPECT_EQ(c.coeffs, (std::vector<double>{4.0, 0.0, -5.0, 0.0, 1.0}));
}

TEST(EspFromSpectrum, RejectsAsymmetricInput) {
  EXPECT_THROW(esp_from_spectrum(SymmetricSpectrum({-1.0, 0.5})), SymmetryViolation);
}

TEST(EspFromSpectrum, MatchesSubsetSum) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto levels = oracle::random_symmetric_levels(rng, 2 + trial % 10, 0.01);
    const auto p = esp_from_spectrum(SymmetricSpectrum(levels));
    const auto q = oracle::subset_expansion(levels);
    for (std::size_t j = 0; j < q.size(); ++j) EXPECT_NEAR(p[j], q[j], 1e-12);
  }
}

TEST(CharPolyEval, Examples) {
  const CharPolyCoeffs p{{0.0, -2.0, 0.0, 1.0}};
  EXPECT_NEAR(charpoly_eval(p, std::sqrt(2.0)), 0.0, 1e-14);
  EXPECT_EQ(charpoly_eval(CharPolyCoeffs{{0.25, -1.0, 3.0}}, 0.0), 0.25);
  EXPECT_EQ(charpoly_eval(CharPolyCoeffs{{0.0, -1.0, 0.0, 1.0}}, 2.0), 6.0);
}

TEST(GaugeReduce, PhaseAccumulation) {
  const std::vector<std::complex<double>> f{1.0, std::polar(1.0, std::numbers::pi / 3.0)};
  const auto g = gauge_reduce(f);
  EXPECT_NEAR(g.moduli[0], 1.0, 1e-15);
  EXPECT_NEAR(g.moduli[1], 1.0, 1e-15);
  ASSERT_EQ(g.phases.size(), 3u);
  EXPECT_EQ(g.phases[0], 0.0);
  EXPECT_NEAR(g.phases[1], 0.0, 1e-15);
  EXPECT_NEAR(g.phases[2], std::numbers::pi / 3.0, 1e-15);
}

TEST(GaugeReduce, RealPositiveIsUnchanged) {
  const std::vector<std::complex<double>> f{0.5, 1.5, 2.5};
  const auto g = gauge_reduce(f);
  EXPECT_EQ(g.moduli, ChainCouplings({0.5, 1.5, 2.5}));
  for (double p : g.phases) EXPECT_EQ(p, 0.0);
}

TEST(GaugeReduce, ImaginaryCouplings) {
  const std::vector<std::complex<double>> f{{0.0, 1.0}, {0.0, 1.0}};
  const auto g = gauge_reduce(f);
  const auto dense = oracle::dense_spectrum(complex_hamiltonian(f));
  EXPECT_LT(oracle::max_abs_diff(dense, {-std::sqrt(2.0), 0.0, std::sqrt(2.0)}), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(values_of(eig_jacobi(g.moduli).spectrum), dense), 1e-12);
}

TEST(GaugeReduce, PhasesMapEigenvectors) {
  const std::vector<std::complex<double>> f{std::polar(1.2, 0.4), std::polar(0.7, -2.0), std::polar(1.9, 2.9)};
  const auto g = gauge_reduce(f);
  const auto es = eig_jacobi(g.moduli);
  const Eigen::MatrixXcd h = complex_hamiltonian(f);
  for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
    Eigen::VectorXcd psi(es.vectors.rows());
    for (Eigen::Index n = 0; n < psi.size(); ++n) {
      psi(n) = std::polar(es.vectors(n, k), -g.phases[static_cast<std::size_t>(n)]);
    }
    const Eigen::VectorXcd r = h * psi - es.spectrum[static_cast<std::size_t>(k)] * psi;
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GaugeReduce, RejectsZeroModulus) {
  const std::vector<std::complex<double>> f{1.0, 0.0};
  EXPECT_THROW(gauge_reduce(f), InvalidInput);
}

TEST(ChainCouplings, RejectsNonPositive) {
  EXPECT_THROW(ChainCouplings({1.0, 0.0}), InvalidInput);
  EXPECT_THROW(ChainCouplings({-1.0}), InvalidInput);
  EXPECT_THROW(ChainCouplings({NAN}), InvalidInput);
}

// Property suites over random chains.

TEST(SpectralProperties, SymmetryAndZeroMode) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = oracle::random_chain(rng, trial % 17);
    const auto e = oracle::dense_spectrum(f);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], -e[e.size() - 1 - i], 1e-10);
    if (f.size() % 2 == 0) {
      double smallest = 1e300;
      const auto eig = eig_jacobi(f);
      for (double x : eig.spectrum.values()) smallest = std::min(smallest, std::abs(x));
      EXPECT_LE(smallest, 1e-10 * std::max(1.0, f.max()));
    }
  }
}

TEST(SpectralProperties, OracleTriangle) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = oracle::random_chain(rng, trial % 11);
    const auto rec = charpoly_coeffs(f);
    const auto expanded = oracle::subset_expansion(oracle::dense_spectrum(f));
    for (std::size_t j = 0; j < rec.coeffs.size(); ++j) {
      const double tol = 1e-8 * std::max(1.0, std::abs(rec[j]));
      EXPECT_NEAR(charpoly_coeffs_closed(f, j), rec[j], tol);
      EXPECT_NEAR(expanded[j], rec[j], tol);
    }
  }
}

TEST(SpectralProperties, Homogeneity) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 10);
    const auto base = charpoly_coeffs(f);
    for (double c : {0.5, 2.0}) {
      const auto scaled = charpoly_coeffs(f.scaled(c));
      const std::size_t n = f.size();
      for (std::size_t j = 0; j <= n + 1; ++j) {
        const double expected = std::pow(c, static_cast<double>(n + 1 - j)) * base[j];
        EXPECT_NEAR(scaled[j], expected, 1e-9 * std::max(1e-300, std::abs(expected)) + 1e-300);
      }
    }
  }
}

TEST(SpectralProperties, SublatticeSignFlip) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 12);
    const auto es = eig_jacobi(f);
    const Eigen::MatrixXd h = hamiltonian(f);
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
      Eigen::VectorXd v = es.vectors.col(k);
      for (Eigen::Index n = 1; n < v.size(); n += 2) v(n) = -v(n);
      const double e = -es.spectrum[static_cast<std::size_t>(k)];
      EXPECT_LT((h * v - e * v).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, es.spectrum.radius()));
    }
  }
}

TEST(SpectralProperties, GaugeInvariance) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const auto moduli = oracle::random_chain(rng, 1 + trial % 12);
    std::vector<std::complex<double>> f;
    for (double r : moduli.values()) f.push_back(std::polar(r, phase(rng)));
    const auto g = gauge_reduce(f);
    const auto dense = oracle::dense_spectrum(complex_hamiltonian(f));
    const auto e = eig_jacobi(g.moduli).spectrum;
    EXPECT_LT(oracle::max_abs_diff({e.values().begin(), e.values().end()}, dense), 1e-10);
  }
}
