#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "plad/noise.hpp"
#include "plad/normal.hpp"

namespace plad {
namespace {

const NoiseFamily kAllFamilies[] = {NoiseFamily::Gaussian,       NoiseFamily::StudentT2,
                                    NoiseFamily::Cauchy,         NoiseFamily::HeteroGaussian,
                                    NoiseFamily::HeteroT2,       NoiseFamily::HeteroMixture};

TEST(Sample, ZeroScaleGaussianIsNoiseless) {
  EXPECT_TRUE(sample(NoiseModel::make(NoiseFamily::Gaussian, 0.0), 50, 1).isZero());
}

TEST(Sample, ReproducibleGivenSeed) {
  for (NoiseFamily family : kAllFamilies) {
    const NoiseModel model = NoiseModel::make(family);
    EXPECT_EQ(sample(model, 500, 42), sample(model, 500, 42)) << to_string(family);
    EXPECT_NE(sample(model, 500, 42), sample(model, 500, 43)) << to_string(family);
    // A longer draw extends a shorter one: each observation has its own stream position.
    EXPECT_EQ(sample(model, 1000, 42).head(500), sample(model, 500, 42)) << to_string(family);
  }
}

TEST(Sample, EveryFamilyHasMedianZero) {
  const Index n = 400000;
  for (NoiseFamily family : kAllFamilies) {
    const Vector z = sample(NoiseModel::make(family), n, 7);
    const double below = static_cast<double>((z.array() < 0.0).count()) / static_cast<double>(n);
    EXPECT_LE(std::abs(below - 0.5), 4.0 * 0.5 / std::sqrt(static_cast<double>(n))) << to_string(family);
  }
}

TEST(Sample, EmpiricalCdfMatchesAnalyticCdf) {
  const Index n = 200000;
  for (NoiseFamily family : kAllFamilies) {
    const NoiseModel model = NoiseModel::make(family);
    const Vector z = sample(model, n, 9);
    for (double x : {-3.0, -1.0, -0.2, 0.3, 1.5, 4.0}) {
      const double empirical = static_cast<double>((z.array() <= x).count()) / static_cast<double>(n);
      const double cdf = noise_cdf(model, x);
      EXPECT_LE(std::abs(empirical - cdf), 4.0 * std::sqrt(cdf * (1 - cdf) / n) + 1e-4)
          << to_string(family) << " x=" << x;
    }
  }
}

TEST(Sample, HeteroscedasticScalesVaryPerObservation) {
  const Vector z = sample(NoiseModel::make(NoiseFamily::HeteroGaussian), 100000, 3);
  // A N(0, s^2) mixture with s ~ U(0, 3) has variance E s^2 = 3.
  EXPECT_NEAR(z.squaredNorm() / 100000.0, 3.0, 0.1);
}

TEST(Cdf, ClosedForms) {
  const NoiseModel gauss = NoiseModel::make(NoiseFamily::Gaussian, 2.0);
  EXPECT_NEAR(noise_cdf(gauss, 2.0), normal_cdf(1.0), 1e-15);
  const NoiseModel cauchy = NoiseModel::make(NoiseFamily::Cauchy);
  EXPECT_NEAR(noise_cdf(cauchy, 1.0), 0.75, 1e-15);
  const NoiseModel t2 = NoiseModel::make(NoiseFamily::StudentT2);
  EXPECT_NEAR(noise_cdf(t2, 1.0), 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
  for (NoiseFamily family : kAllFamilies) {
    const NoiseModel model = NoiseModel::make(family);
    EXPECT_NEAR(noise_cdf(model, 0.0), 0.5, 1e-9) << to_string(family);
    EXPECT_NEAR(noise_cdf(model, 1.3) + noise_sf(model, 1.3), 1.0, 1e-12) << to_string(family);
  }
}

TEST(Certify, ClosedFormLimits) {
  EXPECT_NEAR(certify_scale_parameter(NoiseModel::make(NoiseFamily::Cauchy)), 4.0 / std::numbers::pi, 1e-4);
  EXPECT_NEAR(certify_scale_parameter(NoiseModel::make(NoiseFamily::Gaussian)),
              4.0 / std::sqrt(2.0 * std::numbers::pi), 1e-4);
  EXPECT_NEAR(certify_scale_parameter(NoiseModel::make(NoiseFamily::StudentT2)), std::numbers::sqrt2, 1e-4);
}

TEST(Certify, ScalingDividesA) {
  for (NoiseFamily family : {NoiseFamily::Gaussian, NoiseFamily::StudentT2, NoiseFamily::Cauchy}) {
    const double a1 = certify_scale_parameter(NoiseModel::make(family, 1.0));
    const double a3 = certify_scale_parameter(NoiseModel::make(family, 3.0));
    EXPECT_NEAR(a3, a1 / 3.0, 1e-6 * a1) << to_string(family);
  }
  EXPECT_THROW(certify_scale_parameter(NoiseModel::make(NoiseFamily::Gaussian, 0.0)), DomainError);
}

TEST(Certify, SmallerConstantsAlsoSatisfyTheTailCondition) {
  for (NoiseFamily family : kAllFamilies) {
    const NoiseModel model = NoiseModel::make(family);
    const double a = certify_scale_parameter(model);
    ASSERT_GT(a, 0.0) << to_string(family);
    for (double factor : {1.0, 0.9, 0.5}) {
      for (double x = 1e-4; x < 1e4; x *= 1.37) {
        const double bound = 1.0 / (2.0 + factor * a * x);
        EXPECT_LE(noise_sf(model, x), bound * (1 + 1e-6)) << to_string(family) << " x=" << x;
        EXPECT_LE(noise_cdf(model, -x), bound * (1 + 1e-6)) << to_string(family) << " x=" << x;
      }
    }
  }
}

TEST(DerivativeIdentity, GaussianAndCauchy) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  EXPECT_LE(derivative_identity_check(NoiseModel::make(NoiseFamily::Gaussian), grid, 200000, 1), 0.01);
  EXPECT_LE(derivative_identity_check(NoiseModel::make(NoiseFamily::Cauchy), grid, 200000, 2), 0.01);
  EXPECT_NEAR(1.0 - 2.0 * noise_cdf(NoiseModel::make(NoiseFamily::Gaussian), -1.0), 0.6826894921370859, 1e-12);
  EXPECT_NEAR(1.0 - 2.0 * noise_cdf(NoiseModel::make(NoiseFamily::Cauchy), -2.0), 0.7048327646991335, 1e-12);
}

TEST(GapBound, HoldsAtCertifiedA) {
  const std::vector<double> grid{0.0, 0.1, 1.0, 10.0};
  for (NoiseFamily family : {NoiseFamily::Gaussian, NoiseFamily::Cauchy}) {
    const NoiseModel model = NoiseModel::make(family);
    const GapBoundCheck check =
        expected_gap_lower_bound_check(model, certify_scale_parameter(model), grid, 100000, 5);
    EXPECT_TRUE(check.holds) << to_string(family);
    ASSERT_EQ(check.points.size(), grid.size());
    EXPECT_EQ(check.points[0].lower_bound, 0.0);
  }
  const NoiseModel gauss = NoiseModel::make(NoiseFamily::Gaussian);
  const GapBoundCheck ten = expected_gap_lower_bound_check(gauss, 1.5957691216057308, {10.0}, 100000, 6);
  EXPECT_NEAR(ten.points[0].lower_bound, 3.75, 1e-12);
  EXPECT_NEAR(ten.points[0].mean, 10.0 - std::sqrt(2.0 / std::numbers::pi), 0.02);
}

TEST(Families, NamesRoundTrip) {
  for (NoiseFamily family : kAllFamilies) EXPECT_EQ(parse_noise_family(to_string(family)), family);
  EXPECT_THROW(parse_noise_family("laplace"), DomainError);
  EXPECT_TRUE(NoiseModel::make(NoiseFamily::HeteroT2).heteroscedastic());
  EXPECT_EQ(NoiseModel::make(NoiseFamily::HeteroT2).scale, 3.0);
  EXPECT_TRUE(std::isinf(noise_density_at_zero(NoiseModel::make(NoiseFamily::HeteroMixture))));
}

}  // namespace
}  // namespace plad
