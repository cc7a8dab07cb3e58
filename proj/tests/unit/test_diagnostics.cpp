#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "plad/diagnostics.hpp"
#include "plad/rng.hpp"
#include "test_support.hpp"

namespace plad {
namespace {

DesignMatrix scaled_identity(Index n) {
  return DesignMatrix::from_normalized(std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n));
}

// Exhaustive scan using a general eigen-solver on every k-subset Gram matrix.
std::pair<double, double> subset_scan(const DesignMatrix& x, Index k) {
  double lo = INFINITY, hi = 0.0;
  std::vector<bool> mask(static_cast<std::size_t>(x.p()), false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<Index> cols;
    for (Index j = 0; j < x.p(); ++j) {
      if (mask[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Matrix sub(x.n(), k);
    for (Index c = 0; c < k; ++c) sub.col(c) = x.col(cols[static_cast<std::size_t>(c)]);
    const Eigen::EigenSolver<Matrix> solver(sub.transpose() * sub);
    const Vector ev = solver.eigenvalues().real();
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return {lo, hi};
}

TEST(SparseEigen, BruteForceMatchesIndependentScan) {
  for (Index p : {6, 9, 12}) {
    for (Index k = 1; k <= 3; ++k) {
      const DesignMatrix x = testing::gaussian_design(p == 6 ? 6 : 20, p, 100 + p + k);
      const SparseEigenBounds b = sparse_eigen_bounds(x, k);
      ASSERT_EQ(b.method, EstimateMethod::BruteForce);
      const auto [lo, hi] = subset_scan(x, k);
      EXPECT_NEAR(b.lambda_l, lo, 1e-9 * std::max(1.0, hi));
      EXPECT_NEAR(b.lambda_u, hi, 1e-9 * std::max(1.0, hi));
    }
  }
}

TEST(SparseEigen, ClosedForms) {
  const SparseEigenBounds id = sparse_eigen_bounds(scaled_identity(10), 3);
  EXPECT_NEAR(id.lambda_l, 10.0, 1e-9);
  EXPECT_NEAR(id.lambda_u, 10.0, 1e-9);
  const SparseEigenBounds one = sparse_eigen_bounds(testing::gaussian_design(30, 50, 1), 1);
  EXPECT_NEAR(one.lambda_l, 30.0, 1e-9);
  EXPECT_NEAR(one.lambda_u, 30.0, 1e-9);
}

TEST(SparseEigen, SampledBoundsAreInsideTheExactRange) {
  const DesignMatrix x = testing::gaussian_design(20, 12, 8);
  const SparseEigenBounds exact = sparse_eigen_bounds(x, 3);
  const SparseEigenBounds sampled = sparse_eigen_bounds(x, 3, 50, 4);
  EXPECT_EQ(sampled.method, EstimateMethod::MonteCarlo);
  EXPECT_GE(sampled.lambda_l, exact.lambda_l - 1e-9);
  EXPECT_LE(sampled.lambda_u, exact.lambda_u + 1e-9);
  EXPECT_LE(sampled.lambda_l, sampled.lambda_u);
}

TEST(Restricted, IdentityClosedForms) {
  const Index n = 100;
  const RestrictedEigenvalues re = restricted_eigenvalues(scaled_identity(n), 5, 1.0 / 21.0, 20000, 3);
  EXPECT_GE(re.eta_l, 1.0 - 1e-12);
  EXPECT_LE(re.eta_l, 1.05);
  EXPECT_GE(re.kappa_l, 1.0 / std::sqrt(static_cast<double>(n)) - 1e-12);
  EXPECT_LE(re.kappa_l, 1.05 / std::sqrt(static_cast<double>(n)));
  EXPECT_LE(re.kappa_l, re.kappa_u);
  EXPECT_LE(re.eta_l, re.eta_u);
  EXPECT_TRUE(re.optimistic);
}

TEST(Restricted, RefinementIsMonotone) {
  const DesignMatrix x = testing::gaussian_design(40, 80, 5);
  const RestrictedEigenvalues few = restricted_eigenvalues(x, 3, 0.2, 1000, 9);
  const RestrictedEigenvalues many = restricted_eigenvalues(x, 3, 0.2, 4000, 9);
  EXPECT_LE(many.kappa_l, few.kappa_l);
  EXPECT_LE(many.eta_l, few.eta_l);
  EXPECT_GE(many.kappa_u, few.kappa_u);
  EXPECT_GE(many.eta_u, few.eta_u);
  EXPECT_EQ(restricted_eigenvalues(x, 3, 0.2, 1000, 9).kappa_l, few.kappa_l);
  EXPECT_THROW(restricted_eigenvalues(x, 3, 0.2, 999, 9), DomainError);
}

TEST(Restricted, RatiosAreScaleInvariant) {
  const DesignMatrix x = testing::gaussian_design(20, 30, 6);
  const Vector h = testing::gaussian_vector(30, 7);
  const std::vector<Index> t{0, 4, 9};
  const ConeRatios a = cone_ratios(x, h, t);
  const ConeRatios b = cone_ratios(x, 7.5 * h, t);
  EXPECT_NEAR(a.kappa, b.kappa, 1e-12 * a.kappa);
  EXPECT_NEAR(a.eta, b.eta, 1e-12 * a.eta);
}

TEST(Restricted, NoiselessConditionOnGaussianDesign) {
  const Index n = 100, p = 200, k = 3;
  const DesignMatrix x = testing::gaussian_design(n, p, 10);
  const RestrictedEigenvalues re1 = restricted_eigenvalues(x, k, 1.0, 5000, 11);
  EXPECT_TRUE(noiseless_recovery_condition(2.0 * std::sqrt(n * std::log(static_cast<double>(p))), n, re1));
  EXPECT_TRUE(noiseless_recovery_condition(0.0, n, re1));
  // Identity design: the condition fails at the usual penalty level.
  const RestrictedEigenvalues id = restricted_eigenvalues(scaled_identity(n), k, 1.0, 2000, 12);
  EXPECT_FALSE(noiseless_recovery_condition(2.0 * std::sqrt(n * std::log(static_cast<double>(n))), n, id));
  const RestrictedEigenvalues half = restricted_eigenvalues(x, k, 0.5, 1000, 1);
  EXPECT_THROW(noiseless_recovery_condition(1.0, n, half), DomainError);
}

TEST(TheoremBound, DeskScaleClosedForm) {
  SparseEigenBounds bounds{5, 200.0, 200.0, EstimateMethod::BruteForce, 0};
  RestrictedEigenvalues re;
  re.k = 5;
  re.c_bar = 1.0 / 21.0;
  re.eta_l = 1.0;
  re.kappa_l = 0.5;
  const TheoremBoundReport r = evaluate_theorem_bound(200, 400, 5, 1.1, 1.0, 1.01, bounds, re, 48.95);
  EXPECT_NEAR(r.c1, 29.56711395993652, 1e-9);
  EXPECT_NEAR(r.error_bound, 27086.16496968496, 1e-6);
  EXPECT_NEAR(r.probability_floor, -70.95514794743070, 1e-9);
  EXPECT_FALSE(r.noiseless_condition.has_value());

  const TheoremBoundReport doubled = evaluate_theorem_bound(200, 400, 5, 1.1, 2.0, 1.01, bounds, re, 48.95);
  EXPECT_NEAR(doubled.error_bound, r.error_bound / 2.0, 1e-9 * r.error_bound);
  // Pure function of its inputs.
  EXPECT_EQ(evaluate_theorem_bound(200, 400, 5, 1.1, 1.0, 1.01, bounds, re, 48.95).error_bound, r.error_bound);

  re.eta_l = 0.0;
  EXPECT_THROW(evaluate_theorem_bound(200, 400, 5, 1.1, 1.0, 1.01, bounds, re, 48.95), NonpositiveEta);
}

TEST(TheoremBound, ConditionIComparison) {
  SparseEigenBounds bounds{1, 1.0, 1.0, EstimateMethod::BruteForce, 0};
  RestrictedEigenvalues re;
  re.k = 1;
  re.c_bar = 0.5;
  re.eta_l = 1.0;
  re.kappa_l = 1000.0;
  const TheoremBoundReport r = evaluate_theorem_bound(10000, 20, 1, 3.0, 1.0, 1.01, bounds, re, 10.0);
  EXPECT_NEAR(r.condition_lhs, 3.0 * 100.0 / 16.0 * 1000.0, 1e-9);
  EXPECT_EQ(r.condition_i_holds, r.condition_lhs > r.condition_rhs);
  EXPECT_TRUE(r.condition_i_holds);
}

TEST(GFunction, HandExampleAndRandomInstances) {
  Vector x(2);
  x << 1, 3;
  EXPECT_DOUBLE_EQ(g_function(x, 2.0), 7.0);
  EXPECT_TRUE(g_function_bound_holds(x, 2.0));
  EXPECT_DOUBLE_EQ(g_function(Vector::Zero(3), 1.0), 0.0);
  EXPECT_TRUE(g_function_bound_holds(Vector::Zero(3), 1.0));
  Rng rng(1);
  for (int t = 0; t < 10000; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(20));
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal() * std::pow(10.0, rng.uniform(-2, 2));
    ASSERT_TRUE(g_function_bound_holds(v, std::pow(10.0, rng.uniform(-2, 2))));
  }
}

TEST(GFunction, LiteralSecondBranchNeedsBoundedEntries) {
  Vector spike = Vector::Zero(20);
  spike[0] = 5.0;
  EXPECT_DOUBLE_EQ(g_function(spike, 1.0), 5.0);
  EXPECT_FALSE(g_function_literal_bound_holds(spike, 1.0));
  EXPECT_TRUE(g_function_bound_holds(spike, 1.0));
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    Vector v(10);
    for (Index i = 0; i < 10; ++i) v[i] = rng.uniform(-1.0, 1.0);
    ASSERT_TRUE(g_function_literal_bound_holds(v, 1.0));
  }
}

TEST(NormGap, EdgesAndRandomInstances) {
  EXPECT_TRUE(norm_gap_inequality(Vector::Constant(5, 2.0)).holds());
  Vector e1 = Vector::Zero(4);
  e1[0] = 1.0;
  EXPECT_TRUE(norm_gap_inequality(e1).holds());
  Rng rng(2);
  for (int t = 0; t < 10000; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(30));
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = std::abs(rng.normal()) * std::pow(10.0, rng.uniform(-3, 3));
    std::sort(v.data(), v.data() + n, std::greater<>());
    ASSERT_TRUE(norm_gap_inequality(v).holds());
  }
}

TEST(BlockNorm, HoldsInsideTheCone) {
  Rng rng(3);
  int in_cone = 0;
  for (int t = 0; t < 2000; ++t) {
    Vector h(40);
    for (Index i = 0; i < 40; ++i) h[i] = rng.normal() * (i < 4 ? 10.0 : rng.uniform(0, 0.2));
    const BlockNormCheck check = block_norm_inequality(h, 4, 0.5);
    in_cone += check.in_cone;
    ASSERT_TRUE(check.holds);
  }
  EXPECT_GT(in_cone, 100);
}

TEST(GapProbe, ZeroDirectionAndSymmetry) {
  const DesignMatrix x = testing::gaussian_design(50, 20, 4);
  const NoiseModel noise = NoiseModel::make(NoiseFamily::Gaussian);
  const GapProbe zero = empirical_gap_probe(x, Vector::Zero(20), noise, 1000, 5);
  EXPECT_EQ(zero.mean, 0.0);
  for (double q : zero.deviation_quantiles) EXPECT_EQ(q, 0.0);
  const Vector d = 0.05 * testing::gaussian_vector(20, 6);
  const GapProbe plus = empirical_gap_probe(x, d, noise, 20000, 7);
  const GapProbe minus = empirical_gap_probe(x, -d, noise, 20000, 8);
  EXPECT_NEAR(plus.mean, minus.mean, 4.0 * (plus.std_error + minus.std_error));
  EXPECT_GT(plus.mean, 0.0);
  EXPECT_THROW(empirical_gap_probe(x, d, noise, 999, 1), DomainError);
}

}  // namespace
}  // namespace plad
