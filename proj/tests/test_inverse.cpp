#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invlat/inverse.hpp"
#include "oracles.hpp"

using namespace invlat;

namespace {

const double kGoldA = 2.0 * std::cos(std::numbers::pi / 5.0);
const double kGoldB = 2.0 * std::cos(2.0 * std::numbers::pi / 5.0);

SymmetricSpectrum golden() { return SymmetricSpectrum({-kGoldA, -kGoldB, kGoldB, kGoldA}); }
SymmetricSpectrum root_two() { return SymmetricSpectrum({-std::sqrt(2.0), 0.0, std::sqrt(2.0)}); }

Eigen::MatrixXd finite_difference_jacobian(const std::vector<double>& x, const SymmetricSpectrum& target) {
  const Eigen::VectorXd r0 = residual(x, target);
  Eigen::MatrixXd jac(r0.size(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double step = 1e-6 * std::max(1.0, x[m]);
    auto up = x;
    auto down = x;
    up[m] += step;
    down[m] -= step;
    jac.col(static_cast<Eigen::Index>(m)) = (residual(up, target) - residual(down, target)) / (2.0 * step);
  }
  return jac;
}

}  // namespace

TEST(Residual, Examples) {
  const std::vector<double> ones2{1.0, 1.0};
  const auto r = residual(ones2, root_two());
  ASSERT_EQ(r.size(), 1);
  EXPECT_NEAR(r(0), 0.0, 1e-15);

  const auto r2 = residual(ones2, SymmetricSpectrum({-1.0, 0.0, 1.0}));
  EXPECT_NEAR(r2(0), -1.0, 1e-15);

  const std::vector<double> ones3{1.0, 1.0, 1.0};
  const auto r3 = residual(ones3, golden());
  ASSERT_EQ(r3.size(), 2);
  EXPECT_NEAR(r3(0), 0.0, 1e-14);
  EXPECT_NEAR(r3(1), 0.0, 1e-14);
}

TEST(Residual, DimensionMismatch) {
  const std::vector<double> x{1.0};
  EXPECT_THROW(residual(x, root_two()), DimensionMismatch);
}

TEST(ResidualJacobian, HandDerivatives) {
  const std::vector<double> x2{0.3, 1.7};
  const auto j2 = residual_jacobian(x2, root_two());
  ASSERT_EQ(j2.rows(), 1);
  // Lambda^1 = -(x1 + x2)
  EXPECT_DOUBLE_EQ(j2(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(j2(0, 1), -1.0);

  const std::vector<double> x3{0.5, 2.0, 3.0};
  const auto j3 = residual_jacobian(x3, golden());
  ASSERT_EQ(j3.rows(), 2);
  // Lambda^0 = x1 x3
  EXPECT_DOUBLE_EQ(j3(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(j3(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j3(0, 2), 0.5);
  // Lambda^2 = -(x1 + x2 + x3)
  for (int m = 0; m < 3; ++m) EXPECT_DOUBLE_EQ(j3(1, m), -1.0);
}

TEST(ResidualJacobian, FiniteDifferenceProperty) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 10;
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const SymmetricSpectrum target(oracle::random_symmetric_levels(rng, n + 1, 0.01));
    const auto analytic = residual_jacobian(x, target);
    const auto numeric = finite_difference_jacobian(x, target);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    EXPECT_LE((analytic - numeric).cwiseAbs().maxCoeff(), 1e-5 * scale) << "trial " << trial;
  }
}

TEST(NewtonSolve, CircleN2) {
  InverseProblem p{root_two(), {{1, 1.0}}};
  const auto res = newton_solve(p);
  EXPECT_NEAR(res.couplings[0], 1.0, 1e-12);
  EXPECT_NEAR(res.couplings[1], 1.0, 1e-10);
  EXPECT_LE(res.residual_norm, 1e-12);
}

// With F_2 pinned these targets leave x_1 + x_3 and x_1 x_3 fixed with a
// double root x_1 = x_3, a fold of the surface. The residual is quadratic in
// the coupling error there, so couplings are only good to ~sqrt(eps).
TEST(NewtonSolve, GoldenN3) {
  InverseProblem p{golden(), {{2, 1.0}}};
  const auto res = newton_solve(p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(res.couplings[i], 1.0, 1e-7);
  EXPECT_LE(spectral_mismatch(res.couplings, p.target), 1e-8);
}

TEST(NewtonSolve, HalfIntegerN3) {
  InverseProblem p{SymmetricSpectrum({-1.5, -0.5, 0.5, 1.5}), {{2, 1.0}}};
  const auto res = newton_solve(p);
  EXPECT_NEAR(res.couplings[0], std::sqrt(3.0) / 2.0, 1e-7);
  EXPECT_NEAR(res.couplings[1], 1.0, 1e-15);
  EXPECT_NEAR(res.couplings[2], std::sqrt(3.0) / 2.0, 1e-7);
  EXPECT_LE(spectral_mismatch(res.couplings, p.target), 1e-8);
}

TEST(NewtonSolve, WrongPinCount) {
  InverseProblem p{golden(), {}};
  EXPECT_THROW(newton_solve(p), InvalidInput);
  InverseProblem q{golden(), {{7, 1.0}}};
  EXPECT_THROW(newton_solve(q), InvalidInput);
}

TEST(NewtonSolve, TraceBudgetInfeasible) {
  // F_1^2 must stay below 2 for the N = 2 circle
  InverseProblem p{root_two(), {{1, 1.5}}};
  EXPECT_THROW(newton_solve(p), InfeasiblePins);
}

TEST(NewtonSolve, InfeasibleUnderBudget) {
  // N = 3 with F_1 pinned: F_1^2 F_3^2 = 1 and F_1^2 + F_2^2 + F_3^2 = 3 need
  // F_1^2 + 1/F_1^2 <= 3; F_1 = 0.5 gives 4.25
  InverseProblem p{golden(), {{1, 0.5}}};
  p.max_restarts = 5;
  EXPECT_THROW(newton_solve(p), InfeasiblePins);
}

TEST(NewtonSolve, Deterministic) {
  std::mt19937_64 rng(32);
  const auto levels = oracle::random_symmetric_levels(rng, 9, 0.05);
  const auto source = oracle::lanczos_chain(levels, rng);
  InverseProblem p{SymmetricSpectrum(levels), {}};
  for (std::size_t k : {1, 4, 6, 8}) p.pins[k] = source[k - 1];
  p.seed = 99;
  const auto a = newton_solve(p);
  const auto b = newton_solve(p);
  EXPECT_EQ(a.couplings, b.couplings);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(NewtonSolve, RoundTripProperty) {
  std::mt19937_64 rng(33);
  int converged = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto levels = oracle::random_symmetric_levels(rng, n + 1, 0.05);
    const SymmetricSpectrum target(levels);
    // pins copied from a surface point built by an independent route
    const auto source = oracle::lanczos_chain(levels, rng);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i + 1;
    std::shuffle(idx.begin(), idx.end(), rng);
    InverseProblem p{target, {}};
    for (std::size_t k = 0; k < pin_count(n); ++k) p.pins[idx[k]] = source[idx[k] - 1];
    p.seed = static_cast<std::uint64_t>(trial);
    try {
      const auto res = newton_solve(p);
      EXPECT_LE(spectral_mismatch(res.couplings, target), 1e-8) << trial;
      ++converged;
    } catch (const Error& e) {
      ADD_FAILURE() << "trial " << trial << ": " << e.what();
    }
  }
  EXPECT_GE(converged, 95);
}

TEST(SampleSurface, CircleN2) {
  const auto s = sample_surface(root_two(), 200, 7);
  ASSERT_EQ(s.samples.size(), 200u);
  for (const auto& f : s.samples) EXPECT_NEAR(f[0] * f[0] + f[1] * f[1], 2.0, 1e-8);
}

TEST(SampleSurface, SingleCoupling) {
  const auto s = sample_surface(SymmetricSpectrum({-1.0, 1.0}), 10, 7);
  ASSERT_EQ(s.samples.size(), 10u);
  for (const auto& f : s.samples) EXPECT_NEAR(f[0], 1.0, 1e-12);
}

TEST(SampleSurface, GoldenConstraintsAndMembership) {
  const auto target = golden();
  const auto s = sample_surface(target, 100, 8);
  for (const auto& f : s.samples) {
    const double x1 = f[0] * f[0], x2 = f[1] * f[1], x3 = f[2] * f[2];
    EXPECT_NEAR(x1 + x2 + x3, 3.0, 1e-8);
    EXPECT_NEAR(x1 * x3, 1.0, 1e-8);
    const std::vector<double> x{x1, x2, x3};
    EXPECT_LE(residual(x, target).norm(), 1e-10);
  }
}

TEST(SampleSurface, SpreadsOverSurface) {
  const auto s = sample_surface(root_two(), 50, 9, SurfaceDraw{0.2, 1.0});
  double lo = 10.0, hi = 0.0;
  for (const auto& f : s.samples) {
    lo = std::min(lo, f[0]);
    hi = std::max(hi, f[0]);
  }
  EXPECT_GT(hi - lo, 0.5);
}

TEST(SampleSurface, Deterministic) {
  const auto a = sample_surface(golden(), 5, 3);
  const auto b = sample_surface(golden(), 5, 3);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i], b.samples[i]);
}

TEST(Reconstruct, PositiveEnergyExamples) {
  const std::vector<double> v1{0.5, std::sqrt(2.0) / 2.0, 0.5};
  const auto f1 = reconstruct_from_eigenpair(v1, std::sqrt(2.0));
  EXPECT_NEAR(f1[0], 1.0, 1e-14);
  EXPECT_NEAR(f1[1], 1.0, 1e-14);

  const double s = std::sqrt(10.0);
  const std::vector<double> v2{1.0 / s, std::sqrt(5.0) / s, 2.0 / s};
  const auto f2 = reconstruct_from_eigenpair(v2, std::sqrt(5.0));
  EXPECT_NEAR(f2[0], 1.0, 1e-14);
  EXPECT_NEAR(f2[1], 2.0, 1e-14);
}

TEST(Reconstruct, ZeroEnergyUsesScale) {
  const std::vector<double> v{1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0)};
  const std::vector<double> scale{1.0};
  const auto f = reconstruct_from_eigenpair(v, 0.0, scale);
  EXPECT_NEAR(f[0], 1.0, 1e-15);
  EXPECT_NEAR(f[1], 1.0, 1e-15);
}

TEST(Reconstruct, ZeroEnergyPairsAreIndependent) {
  // N = 4: the zero mode fixes F_2/F_1 and F_4/F_3 but not F_3/F_1
  const ChainCouplings f({0.8, 1.1, 1.7, 0.6});
  const auto es = eig_jacobi(f);
  const std::vector<double> mode(es.vectors.col(2).data(), es.vectors.col(2).data() + 5);
  const std::vector<double> scales{0.8, 1.7};
  const auto g = reconstruct_from_eigenpair(mode, 0.0, scales);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g[i], f[i], 1e-12);
  const std::vector<double> other{0.8, 0.3};
  const auto h = reconstruct_from_eigenpair(mode, 0.0, other);
  const auto eh = eig_jacobi(h);
  EXPECT_NEAR(eh.spectrum[2], 0.0, 1e-12);
  EXPECT_LT((hamiltonian(h) * eh.vectors.col(2)).norm(), 1e-12);
}

TEST(Reconstruct, Errors) {
  const std::vector<double> v{0.6, 0.0, 0.8};
  EXPECT_THROW(reconstruct_from_eigenpair(v, 1.0), ZeroDivision);
  try {
    reconstruct_from_eigenpair(v, 1.0);
  } catch (const ZeroDivision& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  const std::vector<double> bad{0.3, 0.5, 0.9};
  EXPECT_THROW(reconstruct_from_eigenpair(bad, 1.0), NotAnEigenvector);
}

TEST(Reconstruct, PerronUniquenessProperty) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_chain(rng, 1 + trial % 14, 0.3, 1.5);
    const auto es = eig_jacobi(f);
    const Eigen::Index top = es.vectors.cols() - 1;
    const std::vector<double> v(es.vectors.col(top).data(), es.vectors.col(top).data() + es.vectors.rows());
    const auto g = reconstruct_from_eigenpair(v, es.spectrum[static_cast<std::size_t>(top)]);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g[i], f[i], 1e-9 * f[i]) << trial;
  }
}

TEST(JacobiFromWeights, SpectrumAndFirstComponents) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t sites = 2 + trial % 14;
    const auto levels = oracle::random_symmetric_levels(rng, sites, 0.02);
    std::vector<double> amp(sites);
    for (std::size_t i = 0; i < (sites + 1) / 2; ++i) amp[i] = amp[sites - 1 - i] = u(rng);
    const auto f = jacobi_from_weights(SymmetricSpectrum(levels), amp);
    ASSERT_EQ(f.size(), sites - 1);
    EXPECT_LE(oracle::max_abs_diff(oracle::dense_spectrum(f), levels), 1e-10) << trial;

    // squared first components of the dense eigenvectors follow amp^2
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian(f));
    double norm = 0.0;
    for (double a : amp) norm += a * a;
    for (std::size_t k = 0; k < sites; ++k) {
      const double first = es.eigenvectors()(0, static_cast<Eigen::Index>(k));
      EXPECT_NEAR(first * first, amp[k] * amp[k] / norm, 1e-9) << trial;
    }
  }
}

TEST(JacobiFromWeights, UniformChainProfile) {
  // the unit chain's first components are sin(k pi / (N + 2))
  const std::size_t sites = 7;
  std::vector<double> levels;
  std::vector<double> amp;
  for (std::size_t k = sites; k >= 1; --k) {
    levels.push_back(2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(sites + 1)));
    amp.push_back(std::sin(static_cast<double>(k) * std::numbers::pi / static_cast<double>(sites + 1)));
  }
  const auto f = jacobi_from_weights(SymmetricSpectrum(levels), amp);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], 1.0, 1e-12);
}

TEST(JacobiFromWeights, Errors) {
  const std::vector<double> ok{1.0, 1.0, 1.0};
  EXPECT_THROW(jacobi_from_weights(root_two(), std::vector<double>{1.0, 1.0}), DimensionMismatch);
  EXPECT_THROW(jacobi_from_weights(root_two(), std::vector<double>{1.0, 0.5, 0.9}), InvalidInput);
  EXPECT_THROW(jacobi_from_weights(root_two(), std::vector<double>{1.0, 0.0, 1.0}), InvalidInput);
  EXPECT_THROW(jacobi_from_weights(SymmetricSpectrum({-1.0, -1.0, 1.0, 1.0}), std::vector<double>(4, 1.0)),
               DegenerateTarget);
  EXPECT_NO_THROW(jacobi_from_weights(root_two(), ok));
}

TEST(NewtonSolve, LongChainRoundTrip) {
  // 20 levels: the coefficients reach ~1e5, so an absolute 1e-12 sits below
  // their round-off;
  // started near the surface, as sample_surface does
  std::mt19937_64 rng(35);
  int converged = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto levels = oracle::random_symmetric_levels(rng, 20, 0.02);
    const auto source = oracle::lanczos_chain(levels, rng);
    InverseProblem p{SymmetricSpectrum(levels), {}};
    for (std::size_t k = 2; k <= 19; k += 2) p.pins[k] = source[k - 1];
    std::vector<double> guess(source.values().begin(), source.values().end());
    for (auto& g : guess) g *= 1.0 + 0.01 * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    p.initial_guess = ChainCouplings(guess);
    try {
      const auto res = newton_solve(p);
      EXPECT_LE(spectral_mismatch(res.couplings, p.target), 1e-8) << trial;
      ++converged;
    } catch (const Error& e) {
      ADD_FAILURE() << "trial " << trial << ": " << e.what();
    }
  }
  EXPECT_EQ(converged, 10);
}
