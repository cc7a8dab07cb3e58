#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "plad/lad_solver.hpp"
#include "plad/penalty.hpp"
#include "plad/rng.hpp"
#include "test_support.hpp"

namespace plad {
namespace {

SolverOptions with_backend(SolverBackend backend) {
  SolverOptions options;
  options.backend = backend;
  return options;
}

TEST(Augment, PseudoRowsHoldLambdaOnTheDiagonal) {
  const DesignMatrix x = testing::gaussian_design(2, 2, 1);
  const AugmentedProblem problem = augment(x, Vector::Ones(2), 5.0);
  const Matrix xa = problem.x_aug();
  const Vector ya = problem.y_aug();
  ASSERT_EQ(xa.rows(), 4);
  EXPECT_EQ(xa.bottomRows(2), Matrix(5.0 * Matrix::Identity(2, 2)));
  EXPECT_EQ(ya.tail(2), Vector::Zero(2));
  EXPECT_EQ(xa.topRows(2), x.values());
  EXPECT_TRUE(augment(x, Vector::Ones(2), 0.0).x_aug().bottomRows(2).isZero());
  EXPECT_THROW(augment(x, Vector::Ones(2), -1.0), DomainError);
}

TEST(Augment, ObjectiveIdentityOnRandomInstances) {
  Rng rng(11);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(30));
    const Index p = 1 + static_cast<Index>(rng.below(30));
    const DesignMatrix x = testing::gaussian_design(n, p, 100 + t);
    const Vector y = testing::gaussian_vector(n, 200 + t, 3.0);
    const Vector gamma = testing::gaussian_vector(p, 300 + t);
    const double lambda = rng.uniform(0.0, 20.0);
    const double direct = plad_objective(x, y, gamma, lambda);
    const AugmentedProblem problem = augment(x, y, lambda);
    const double dense = (problem.y_aug() - problem.x_aug() * gamma).lpNorm<1>();
    EXPECT_LE(std::abs(direct - problem.objective(gamma)), 1e-12 * std::max(1.0, direct));
    EXPECT_LE(std::abs(direct - dense), 1e-12 * std::max(1.0, direct));
  }
}

TEST(Solver, ConstantRegressorGivesTheMedian) {
  const DesignMatrix x = DesignMatrix::from_normalized(Matrix::Ones(3, 1));
  Vector y(3);
  y << 1, 2, 10;
  for (auto backend : {SolverBackend::InteriorPoint, SolverBackend::Simplex, SolverBackend::Tableau}) {
    const FitResult fit = fit_plad(x, y, 0.0, with_backend(backend));
    EXPECT_NEAR(fit.coefficients.beta[0], 2.0, 1e-9) << to_string(backend);
    EXPECT_NEAR(fit.objective, 9.0, 1e-9);
  }
}

TEST(Solver, MedianOfRandomOddSamples) {
  Rng rng(3);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Index n = 2 * static_cast<Index>(rng.below(25)) + 1;
    const DesignMatrix x = DesignMatrix::from_normalized(Matrix::Ones(n, 1));
    const Vector y = testing::gaussian_vector(n, 50 + t, 10.0);
    std::vector<double> sorted(y.data(), y.data() + n);
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const FitResult fit = fit_plad(x, y, 0.0);
    EXPECT_LE(std::abs(fit.coefficients.beta[0] - sorted[n / 2]), 1e-8);
  }
}

TEST(Solver, PerfectInterpolation) {
  const DesignMatrix x = testing::gaussian_design(20, 4, 7);
  const Vector gamma = testing::gaussian_vector(4, 8);
  const FitResult fit = fit_plad(x, x.values() * gamma, 0.0);
  EXPECT_LT((fit.coefficients.beta - gamma).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(fit.objective, 0.0, 1e-8);
}

TEST(Solver, ScreenedColumnIsZero) {
  const DesignMatrix x = testing::gaussian_design(5, 2, 17);
  Vector beta(2);
  beta << 3, 0;
  const Vector y = x.values() * beta + testing::gaussian_vector(5, 18, 0.01);
  const double lambda = x.col(1).lpNorm<1>() * 1.01;
  ASSERT_GT(lambda, 0.0);
  const FitResult fit = fit_plad(x, y, lambda);
  EXPECT_EQ(fit.coefficients.beta[1], 0.0);
  // The objective as a function of gamma_2 alone is minimized at zero.
  Vector probe = fit.coefficients.beta;
  for (int g = -100; g <= 100; ++g) {
    probe[1] = g * 0.01;
    EXPECT_GE(plad_objective(x, y, probe, lambda) + 1e-12, fit.objective);
  }
}

TEST(Solver, ScreeningHoldsOnRandomInstances) {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const DesignMatrix x = testing::gaussian_design(15, 25, 900 + t);
    const Vector y = testing::gaussian_vector(15, 950 + t, 2.0);
    const Vector l1 = x.column_l1_norms();
    const double lambda = l1.minCoeff() + 0.5 * (l1.maxCoeff() - l1.minCoeff());
    const FitResult fit = fit_plad(x, y, lambda);
    for (Index j : screening_check(x, lambda)) EXPECT_EQ(fit.coefficients.beta[j], 0.0);
  }
}

TEST(Solver, TotalScreeningReturnsZero) {
  const DesignMatrix x = testing::gaussian_design(12, 8, 21);
  const Vector y = testing::gaussian_vector(12, 22);
  const FitResult fit = fit_plad(x, y, x.column_l1_norms().maxCoeff() * 1.5);
  EXPECT_TRUE(fit.coefficients.beta.isZero());
  EXPECT_TRUE(fit.coefficients.support.empty());
}

TEST(Solver, KktCertificateOnRandomSuite) {
  Rng rng(5);
  for (std::uint64_t t = 0; t < 60; ++t) {
    const Index n = 5 + static_cast<Index>(rng.below(56));
    const Index p = 1 + static_cast<Index>(rng.below(120));
    const DesignMatrix x = testing::gaussian_design(n, p, 1000 + t);
    const Vector y = testing::gaussian_vector(n, 2000 + t, 2.0);
    const double lambda = rng.uniform(0.0, 2.0) * std::sqrt(n * std::log(static_cast<double>(p) + 1.0));
    const FitResult fit = fit_plad(x, y, lambda);
    ASSERT_NE(fit.status, SolverStatus::IterationLimit);
    EXPECT_LE(fit.kkt_gap, 1e-8);
    EXPECT_LE(kkt_gap(augment(x, y, lambda), fit.coefficients.beta, 1e-8), 1e-8);
    EXPECT_NEAR(fit.objective, plad_objective(x, y, fit.coefficients.beta, lambda),
                1e-9 * std::max(1.0, fit.objective));
    EXPECT_LT((fit.residuals - (y - x.values() * fit.coefficients.beta)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Solver, VerifierRejectsSuboptimalPoints) {
  const DesignMatrix x = testing::gaussian_design(20, 5, 31);
  const Vector y = testing::gaussian_vector(20, 32);
  const FitResult fit = fit_plad(x, y, 3.0);
  Vector moved = fit.coefficients.beta;
  moved[0] += 0.5;
  EXPECT_GT(kkt_gap(augment(x, y, 3.0), moved, 1e-8), 1e-3);
}

TEST(Solver, BackendsAgreeOnSmallInstances) {
  Rng rng(77);
  for (std::uint64_t t = 0; t < 40; ++t) {
    const Index n = 5 + static_cast<Index>(rng.below(60));
    const Index p = 1 + static_cast<Index>(rng.below(200 - n - 5));
    const DesignMatrix x = testing::gaussian_design(n, p, 3000 + t);
    const Vector y = testing::gaussian_vector(n, 4000 + t, 3.0);
    const double lambda = rng.uniform(0.0, 1.5) * std::sqrt(2.0 * n * std::log(p + 1.0));
    const FitResult ipm = fit_plad(x, y, lambda, with_backend(SolverBackend::InteriorPoint));
    const FitResult simplex = fit_plad(x, y, lambda, with_backend(SolverBackend::Simplex));
    const FitResult tableau = fit_plad(x, y, lambda, with_backend(SolverBackend::Tableau));
    const double scale = std::max(1.0, tableau.objective);
    EXPECT_LE(std::abs(ipm.objective - tableau.objective), 1e-7 * scale) << "n=" << n << " p=" << p;
    EXPECT_LE(std::abs(simplex.objective - tableau.objective), 1e-7 * scale) << "n=" << n << " p=" << p;
  }
}

TEST(Solver, NoiselessRecoveryMatchesTheCertificateAtTheTruth) {
  // The solver returns beta exactly when beta itself is a minimizer.
  const Index n = 40, p = 60;
  int recovered_default = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const DesignMatrix x = testing::gaussian_design(n, p, 4242 + t);
    Vector beta = Vector::Zero(p);
    beta[3] = 3.0;
    beta[17] = -3.0;
    const Vector y = x.values() * beta;
    for (double lambda : {2.0 * std::sqrt(n * std::log(static_cast<double>(p))), penalty_default(n, p)}) {
      const FitResult fit = fit_plad(x, y, lambda);
      const bool recovered = (fit.coefficients.beta - beta).cwiseAbs().maxCoeff() <= 1e-6;
      const bool certified = kkt_gap(augment(x, y, lambda), beta, 1e-8) <= 1e-8;
      EXPECT_EQ(recovered, certified) << "seed " << t << " lambda " << lambda;
      if (lambda == penalty_default(n, p)) recovered_default += recovered;
    }
  }
  EXPECT_GE(recovered_default, 18);
}

TEST(Solver, RandomProbesNeverImprove) {
  const DesignMatrix x = testing::gaussian_design(30, 50, 606);
  Vector beta = Vector::Zero(50);
  beta.head(3).setConstant(2.0);
  const Vector y = x.values() * beta + testing::gaussian_vector(30, 607);
  const double lambda = std::sqrt(2.0 * 30 * std::log(50.0));
  const FitResult fit = fit_plad(x, y, lambda);
  Rng rng(608);
  for (int t = 0; t < 10000; ++t) {
    Vector delta(50);
    for (Index j = 0; j < 50; ++j) delta[j] = rng.normal();
    delta *= rng.uniform() / delta.norm();
    EXPECT_GE(plad_objective(x, y, fit.coefficients.beta + delta, lambda),
              fit.objective - 1e-9 * fit.objective);
  }
}

TEST(Solver, ErrorLiesInRestrictedSetWhenPenaltyDominates) {
  const double c = 1.1;
  const Index n = 50, p = 80, k = 3;
  int checked = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const DesignMatrix x = testing::gaussian_design(n, p, 5000 + t);
    Vector beta = Vector::Zero(p);
    beta.head(k).setConstant(3.0);
    const Vector z = testing::gaussian_vector(n, 6000 + t);
    const Vector y = x.values() * beta + z;
    const double lambda = c * subdiff_statistic(x, z).sup_norm * 1.0001;
    const FitResult fit = fit_plad(x, y, lambda);
    const Vector h = fit.coefficients.beta - beta;
    // ||h_T||_1 >= c_bar ||h_{T^c}||_1 on the true support T.
    const double on = h.head(k).lpNorm<1>();
    const double off = h.tail(p - k).lpNorm<1>();
    EXPECT_GE(on + 1e-9, (c - 1.0) / (c + 1.0) * off);
    EXPECT_TRUE(h.isZero(1e-12) || in_restricted_set(h, k, (c - 1.0) / (c + 1.0)).member);
    ++checked;
  }
  EXPECT_EQ(checked, 20);
}

TEST(Refit, MatchesPlainLadOnSelectedColumns) {
  const DesignMatrix x = testing::gaussian_design(25, 6, 44);
  const Vector y = testing::gaussian_vector(25, 45);
  const std::vector<Index> all{0, 1, 2, 3, 4, 5};
  const FitResult full = refit_on_support(x, y, all);
  const FitResult plain = fit_plad(x, y, 0.0);
  EXPECT_NEAR(full.objective, plain.objective, 1e-8);

  const std::vector<Index> some{1, 4};
  const FitResult sub = refit_on_support(x, y, some);
  EXPECT_EQ(sub.coefficients.beta[0], 0.0);
  EXPECT_EQ(sub.coefficients.beta[2], 0.0);
  const FitResult direct = fit_plad(x.select_columns(some), y, 0.0);
  EXPECT_NEAR(sub.objective, direct.objective, 1e-8);
}

TEST(Refit, ConstantColumnGivesRescaledMedian) {
  Matrix raw(5, 2);
  raw.col(0).setOnes();
  raw.col(1) << 1, -2, 3, 0.5, 1;
  const DesignMatrix x = normalize_columns(raw);
  Vector y(5);
  y << 4, -1, 7, 2, 9;
  const std::vector<Index> support{0};
  EXPECT_NEAR(refit_on_support(x, y, support).coefficients.beta[0], 4.0, 1e-9);
}

TEST(Refit, EmptySupportWarns) {
  const DesignMatrix x = testing::gaussian_design(5, 3, 1);
  const FitResult fit = refit_on_support(x, testing::gaussian_vector(5, 2), {});
  EXPECT_TRUE(fit.coefficients.beta.isZero());
  EXPECT_FALSE(fit.warnings.empty());
}

}  // namespace
}  // namespace plad
