#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plad/core_model.hpp"

namespace plad {

enum class NoiseFamily {
  Gaussian,        // scale * N(0, 1)
  StudentT2,       // scale * t(2)
  Cauchy,          // scale * Cauchy(0, 1)
  HeteroGaussian,  // sigma_i * N(0, 1), sigma_i ~ U(0, scale)
  HeteroT2,        // s_i * t(2), s_i ~ U(0, scale)
  HeteroMixture,   // per observation, one of the above or s_i * (Exp(1) - ln 2), each w.p. 1/3
};

const char* to_string(NoiseFamily family) noexcept;
/// gaussian, t2, cauchy, hetero_gaussian, hetero_t2, hetero_mixture.
NoiseFamily parse_noise_family(const std::string& name);

struct NoiseModel {
  NoiseFamily family = NoiseFamily::Gaussian;
  /// Fixed scale for the homoscedastic families, upper end of the uniform
  /// scale law for the heteroscedastic ones.
  double scale = 1.0;
  std::optional<double> certified_a;
  std::uint64_t seed = 0;

  bool heteroscedastic() const noexcept;
  /// Default scale is 1 for the homoscedastic families and 3 otherwise.
  static NoiseModel make(NoiseFamily family, std::optional<double> scale = std::nullopt,
                         std::uint64_t seed = 0);
};

/// n independent draws. Scale variables, base variates and mixture labels
/// come from separate streams derived from `seed`.
Vector sample(const NoiseModel& model, Index n, std::uint64_t seed);
inline Vector sample(const NoiseModel& model, Index n) { return sample(model, n, model.seed); }

/// P(z <= x) and P(z >= x). Scale mixtures are integrated numerically.
double noise_cdf(const NoiseModel& model, double x);
double noise_sf(const NoiseModel& model, double x);
/// Density at the median; +infinity for the uniform scale mixtures.
double noise_density_at_zero(const NoiseModel& model);

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Largest a with P(z >= x) <= 1/(2 + a x) and P(z <= -x) <= 1/(2 + a x) for
/// all x > 0: the infimum of (1/tail(x) - 2)/x over `grid` log-spaced points
/// in [1e-6, 1e6] and the x -> 0 limit 4 f(0), refined by golden section.
/// Returns 0 when the tail condition fails somewhere.
double certify_scale_parameter(const NoiseModel& model, int grid = 2048);

/// max over x of |central difference of the MC mean of |z + x| - |z|
///   - (1 - 2 P(z <= -x))|, with common random numbers across the stencil.
double derivative_identity_check(const NoiseModel& model, const std::vector<double>& x_grid,
                                 int mc_reps, std::uint64_t seed, double step = 1e-2);

struct GapBoundPoint {
  double c = 0.0;
  double mean = 0.0;       // MC estimate of E(|z + c| - |z|)
  double std_error = 0.0;
  double lower_bound = 0.0;  // (a/16)|c| min(|c|, 6/a)
  bool holds = false;        // mean >= lower_bound - 3 std_error
};

struct GapBoundCheck {
  bool holds = true;
  std::vector<GapBoundPoint> points;
};

GapBoundCheck expected_gap_lower_bound_check(const NoiseModel& model, double a,
                                             const std::vector<double>& c_grid, int mc_reps,
                                             std::uint64_t seed);

}  // namespace plad
