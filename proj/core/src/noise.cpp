#include "plad/noise.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "plad/rng.hpp"

namespace plad {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit-scale, median-zero base laws.
enum class Base { Normal, T2, Cauchy, Exponential };

// P(Z >= t) when upper, P(Z <= -t) otherwise; t >= 0.
double base_tail(Base base, bool upper, double t) {
  switch (base) {
    case Base::Normal:
      return 0.5 * std::erfc(t / std::numbers::sqrt2);
    case Base::T2: {
      const double r = std::sqrt(2.0 + t * t);
      return 1.0 / (r * (r + t));
    }
    case Base::Cauchy:
      return std::atan2(1.0, t) / std::numbers::pi;
    case Base::Exponential:
      // Exp(1) - ln 2
      if (upper) return 0.5 * std::exp(-t);
      return t < std::numbers::ln2 ? 1.0 - 0.5 * std::exp(t) : 0.0;
  }
  return 0.0;
}

double base_density0(Base base) {
  switch (base) {
    case Base::Normal: return 1.0 / std::sqrt(2.0 * std::numbers::pi);
    case Base::T2: return 1.0 / (2.0 * std::numbers::sqrt2);
    case Base::Cauchy: return 1.0 / std::numbers::pi;
    case Base::Exponential: return 0.5;
  }
  return 0.0;
}

struct Component {
  Base base;
  double weight;
};

std::vector<Component> components(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian:
    case NoiseFamily::HeteroGaussian: return {{Base::Normal, 1.0}};
    case NoiseFamily::StudentT2:
    case NoiseFamily::HeteroT2: return {{Base::T2, 1.0}};
    case NoiseFamily::Cauchy: return {{Base::Cauchy, 1.0}};
    case NoiseFamily::HeteroMixture:
      return {{Base::Normal, 1.0 / 3.0}, {Base::T2, 1.0 / 3.0}, {Base::Exponential, 1.0 / 3.0}};
  }
  return {};
}

constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066278357763, 0.3626837833783620,
    0.3626837833783620, 0.3137066278357763, 0.2223810344533745, 0.1012285362903763};

// (1/S) int_0^S tail(x / sigma) dsigma
//   = (x/S) int_{x/S}^inf tail(t) / t^2 dt, integrated in u = log t.
double uniform_scale_tail(Base base, bool upper, double x, double upper_scale) {
  if (x == 0.0) return base_tail(base, upper, 0.0);
  const double lo = std::log(x / upper_scale);
  constexpr double kSpan = 40.0;
  constexpr int kPanels = 160;
  constexpr double kWidth = kSpan / kPanels;
  double sum = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double mid = lo + (k + 0.5) * kWidth;
    for (std::size_t g = 0; g < kGlNodes.size(); ++g) {
      const double u = mid + 0.5 * kWidth * kGlNodes[g];
      sum += kGlWeights[g] * base_tail(base, upper, std::exp(u)) * std::exp(-u);
    }
  }
  return (x / upper_scale) * 0.5 * kWidth * sum;
}

// P(z >= x) (upper) or P(z <= -x), x >= 0, for a non-degenerate model.
double model_tail(const NoiseModel& model, bool upper, double x) {
  double out = 0.0;
  for (const Component& comp : components(model.family)) {
    const double tail = model.heteroscedastic()
                            ? uniform_scale_tail(comp.base, upper, x, model.scale)
                            : base_tail(comp.base, upper, x / model.scale);
    out += comp.weight * tail;
  }
  return out;
}

void require_scale(const NoiseModel& model) {
  if (!(model.scale >= 0.0) || !std::isfinite(model.scale)) {
    throw DomainError("noise model: scale must be finite and nonnegative");
  }
}

double tail_ratio(const NoiseModel& model, double x) {
  double ratio = kInf;
  for (bool upper : {true, false}) {
    const double tail = model_tail(model, upper, x);
    if (std::isnan(tail)) throw NumericalFailure("noise tail evaluation returned NaN");
    if (tail > 0.0) ratio = std::min(ratio, (1.0 / tail - 2.0) / x);
  }
  return ratio;
}

}  // namespace

const char* to_string(NoiseFamily family) noexcept {
  switch (family) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::StudentT2: return "t2";
    case NoiseFamily::Cauchy: return "cauchy";
    case NoiseFamily::HeteroGaussian: return "hetero_gaussian";
    case NoiseFamily::HeteroT2: return "hetero_t2";
    case NoiseFamily::HeteroMixture: return "hetero_mixture";
  }
  return "?";
}

NoiseFamily parse_noise_family(const std::string& name) {
  for (NoiseFamily family :
       {NoiseFamily::Gaussian, NoiseFamily::StudentT2, NoiseFamily::Cauchy,
        NoiseFamily::HeteroGaussian, NoiseFamily::HeteroT2, NoiseFamily::HeteroMixture}) {
    if (name == to_string(family)) return family;
  }
  throw DomainError("unknown noise family '" + name + "'");
}

bool NoiseModel::heteroscedastic() const noexcept {
  return family == NoiseFamily::HeteroGaussian || family == NoiseFamily::HeteroT2 ||
         family == NoiseFamily::HeteroMixture;
}

NoiseModel NoiseModel::make(NoiseFamily family, std::optional<double> scale, std::uint64_t seed) {
  NoiseModel model;
  model.family = family;
  model.seed = seed;
  model.scale = scale.value_or(model.heteroscedastic() ? 3.0 : 1.0);
  require_scale(model);
  return model;
}

Vector sample(const NoiseModel& model, Index n, std::uint64_t seed) {
  require_scale(model);
  if (n < 1) throw DomainError("sample: n must be at least 1");
  Rng scales(derive_seed(seed, {0}));
  Rng base(derive_seed(seed, {1}));
  Rng labels(derive_seed(seed, {2}));
  const auto t2 = [&] { return base.normal() / std::sqrt(base.exponential()); };

  Vector z(n);
  for (Index i = 0; i < n; ++i) {
    switch (model.family) {
      case NoiseFamily::Gaussian: z[i] = model.scale * base.normal(); break;
      case NoiseFamily::StudentT2: z[i] = model.scale * t2(); break;
      case NoiseFamily::Cauchy:
        z[i] = model.scale * std::tan(std::numbers::pi * (base.uniform() - 0.5));
        break;
      case NoiseFamily::HeteroGaussian:
        z[i] = scales.uniform(0.0, model.scale) * base.normal();
        break;
      case NoiseFamily::HeteroT2: z[i] = scales.uniform(0.0, model.scale) * t2(); break;
      case NoiseFamily::HeteroMixture: {
        const double s = scales.uniform(0.0, model.scale);
        const double u = labels.uniform();
        if (u < 1.0 / 3.0) {
          z[i] = s * base.normal();
        } else if (u < 2.0 / 3.0) {
          z[i] = s * t2();
        } else {
          z[i] = s * (base.exponential() - std::numbers::ln2);
        }
        break;
      }
    }
  }
  return z;
}

double noise_cdf(const NoiseModel& model, double x) {
  require_scale(model);
  if (model.scale == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  return x >= 0.0 ? 1.0 - model_tail(model, true, x) : model_tail(model, false, -x);
}

double noise_sf(const NoiseModel& model, double x) {
  require_scale(model);
  if (model.scale == 0.0) return x <= 0.0 ? 1.0 : 0.0;
  return x >= 0.0 ? model_tail(model, true, x) : 1.0 - model_tail(model, false, -x);
}

double noise_density_at_zero(const NoiseModel& model) {
  require_scale(model);
  if (model.scale == 0.0 || model.heteroscedastic()) return kInf;
  double out = 0.0;
  for (const Component& comp : components(model.family)) {
    out += comp.weight * base_density0(comp.base) / model.scale;
  }
  return out;
}

double certify_scale_parameter(const NoiseModel& model, int grid) {
  require_scale(model);
  if (model.scale == 0.0) throw DomainError("certify_scale_parameter: degenerate noise");
  if (grid < 3) throw DomainError("certify_scale_parameter: grid needs at least 3 points");

  const double log_lo = std::log(1e-6);
  const double log_step = (std::log(1e6) - log_lo) / (grid - 1);
  double best = kInf;
  int best_k = -1;
  for (int k = 0; k < grid; ++k) {
    const double ratio = tail_ratio(model, std::exp(log_lo + k * log_step));
    if (ratio < 0.0) return 0.0;
    if (ratio < best) {
      best = ratio;
      best_k = k;
    }
  }

  if (best_k > 0 && best_k < grid - 1) {
    // Golden-section search in log x between the neighbours of the grid minimum.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = log_lo + (best_k - 1) * log_step;
    double hi = log_lo + (best_k + 1) * log_step;
    double m1 = hi - kInvPhi * (hi - lo);
    double m2 = lo + kInvPhi * (hi - lo);
    double f1 = tail_ratio(model, std::exp(m1));
    double f2 = tail_ratio(model, std::exp(m2));
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = m2;
        m2 = m1;
        f2 = f1;
        m1 = hi - kInvPhi * (hi - lo);
        f1 = tail_ratio(model, std::exp(m1));
      } else {
        lo = m1;
        m1 = m2;
        f1 = f2;
        m2 = lo + kInvPhi * (hi - lo);
        f2 = tail_ratio(model, std::exp(m2));
      }
    }
    best = std::min({best, f1, f2});
    if (best < 0.0) return 0.0;
  }
  return std::min(best, 4.0 * noise_density_at_zero(model));
}

double derivative_identity_check(const NoiseModel& model, const std::vector<double>& x_grid,
                                 int mc_reps, std::uint64_t seed, double step) {
  if (mc_reps < 1) throw DomainError("derivative_identity_check: mc_reps must be positive");
  if (!(step > 0.0)) throw DomainError("derivative_identity_check: step must be positive");
  const Vector z = sample(model, mc_reps, seed);
  double worst = 0.0;
  for (double x : x_grid) {
    const double forward = ((z.array() + x + step).abs() - z.array().abs()).mean();
    const double backward = ((z.array() + x - step).abs() - z.array().abs()).mean();
    const double estimate = (forward - backward) / (2.0 * step);
    const double exact = 1.0 - 2.0 * noise_cdf(model, -x);
    worst = std::max(worst, std::abs(estimate - exact));
  }
  return worst;
}

GapBoundCheck expected_gap_lower_bound_check(const NoiseModel& model, double a,
                                             const std::vector<double>& c_grid, int mc_reps,
                                             std::uint64_t seed) {
  if (!(a > 0.0)) throw DomainError("expected_gap_lower_bound_check: a must be positive");
  if (mc_reps < 2) throw DomainError("expected_gap_lower_bound_check: mc_reps must be >= 2");
  const Vector z = sample(model, mc_reps, seed);
  GapBoundCheck out;
  for (double c : c_grid) {
    GapBoundPoint point;
    point.c = c;
    const Eigen::ArrayXd gap = (z.array() + c).abs() - z.array().abs();
    point.mean = gap.mean();
    const double var = (gap - point.mean).square().sum() / (mc_reps - 1);
    point.std_error = std::sqrt(var / mc_reps);
    point.lower_bound = a / 16.0 * std::abs(c) * std::min(std::abs(c), 6.0 / a);
    point.holds = point.mean >= point.lower_bound - 3.0 * point.std_error;
    out.holds = out.holds && point.holds;
    out.points.push_back(point);
  }
  return out;
}

}  // namespace plad
