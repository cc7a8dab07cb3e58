#include "plad/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "plad/normal.hpp"
#include "plad/parallel.hpp"
#include "plad/rng.hpp"

namespace plad {
namespace {

void require_dims(Index n, Index p) {
  if (n < 1) throw DomainError("penalty: n must be at least 1");
  if (p < 2) throw DomainError("penalty: p must be at least 2");
}

double refined_quantile(double alpha, Index p) {
  return inverse_normal_cdf(1.0 - alpha / (2.0 * static_cast<double>(p)));
}

}  // namespace

const char* to_string(PenaltyRule rule) noexcept {
  switch (rule) {
    case PenaltyRule::Asymptotic: return "asymptotic";
    case PenaltyRule::Simple: return "simple";
    case PenaltyRule::Refined: return "refined";
    case PenaltyRule::MonteCarloQuantile: return "mc";
    case PenaltyRule::Fixed: return "fixed";
    case PenaltyRule::Default: return "default";
  }
  return "?";
}

PenaltyRule parse_penalty_rule(const std::string& name) {
  for (PenaltyRule rule : {PenaltyRule::Asymptotic, PenaltyRule::Simple, PenaltyRule::Refined,
                           PenaltyRule::MonteCarloQuantile, PenaltyRule::Fixed,
                           PenaltyRule::Default}) {
    if (name == to_string(rule)) return rule;
  }
  throw DomainError("unknown penalty rule '" + name + "'");
}

void PenaltySpec::validate() const {
  if (!(c > 1.0)) throw DomainError("penalty: c must exceed 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("penalty: alpha must lie in (0, 1)");
  if (fixed_value.has_value() != (rule == PenaltyRule::Fixed)) {
    throw DomainError("penalty: a fixed value is required exactly for the fixed rule");
  }
  if (fixed_value && !(*fixed_value >= 0.0)) throw DomainError("penalty: fixed value must be >= 0");
  if (rule == PenaltyRule::Refined && !(q > 2.0)) throw DomainError("penalty: q must exceed 2");
}

double a_of_alpha(double alpha, Index p) {
  if (!(alpha > 0.0)) throw DomainError("a_of_alpha: alpha must be positive");
  if (p < 2) throw DomainError("a_of_alpha: p must be at least 2");
  return 1.0 + std::log(2.0 / alpha) / std::log(static_cast<double>(p));
}

double penalty_asymptotic(Index n, Index p, double c, double alpha) {
  require_dims(n, p);
  return c * std::sqrt(2.0 * a_of_alpha(alpha, p) * static_cast<double>(n) *
                       std::log(static_cast<double>(p)));
}

double penalty_simple(Index n, Index p, double c) {
  require_dims(n, p);
  return 2.0 * c * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(p)));
}

double penalty_default(Index n, Index p) {
  require_dims(n, p);
  return std::sqrt(2.0 * static_cast<double>(n) * std::log(static_cast<double>(p)));
}

MomentCondition moment_condition(const DesignMatrix& x, double q, double alpha) {
  if (!(q > 2.0)) throw DomainError("moment_condition: q must exceed 2");
  MomentCondition out;
  out.q = q;
  out.b = x.values().array().abs().pow(q).colwise().sum().maxCoeff() /
          static_cast<double>(x.n());
  out.admissible = refined_quantile(alpha, x.p()) <=
                   (q - 2.0) * std::sqrt(std::log(static_cast<double>(x.n())));
  return out;
}

RefinedPenalty penalty_refined(const DesignMatrix& x, double c, double alpha, double q) {
  require_dims(x.n(), x.p());
  RefinedPenalty out;
  out.moment = moment_condition(x, q, alpha);
  out.lambda = c * std::sqrt(static_cast<double>(x.n())) * refined_quantile(alpha, x.p());
  return out;
}

std::vector<double> rademacher_sup_norms(const DesignMatrix& x, int reps, std::uint64_t seed) {
  if (reps < 1) throw DomainError("rademacher_sup_norms: reps must be positive");
  std::vector<double> out(static_cast<std::size_t>(reps));
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (out.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    Vector signs(x.n());
    for (std::size_t r = chunk * kChunk; r < std::min(out.size(), (chunk + 1) * kChunk); ++r) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
      for (Index i = 0; i < signs.size(); ++i) signs[i] = rng.rademacher();
      out[r] = (x.values().transpose() * signs).lpNorm<Eigen::Infinity>();
    }
  });
  return out;
}

double mc_quantile_penalty(const DesignMatrix& x, double c, double alpha, int reps,
                           std::uint64_t seed) {
  if (reps < 100) throw DomainError("mc_quantile_penalty: reps must be at least 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("mc_quantile_penalty: alpha in (0, 1)");
  std::vector<double> draws = rademacher_sup_norms(x, reps, seed);
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps)));
  rank = std::clamp<std::size_t>(rank, 1, draws.size());
  std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   draws.end());
  return c * draws[rank - 1];
}

std::vector<Index> screening_check(const DesignMatrix& x, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("screening_check: lambda must be nonnegative");
  const Vector norms = x.column_l1_norms();
  std::vector<Index> dead;
  for (Index j = 0; j < norms.size(); ++j) {
    if (norms[j] < lambda) dead.push_back(j);
  }
  return dead;
}

PenaltyChoice choose_penalty(const DesignMatrix& x, const PenaltySpec& spec) {
  spec.validate();
  PenaltyChoice out;
  out.rule = spec.rule;
  switch (spec.rule) {
    case PenaltyRule::Asymptotic:
      out.a_alpha = a_of_alpha(spec.alpha, x.p());
      out.lambda = penalty_asymptotic(x.n(), x.p(), spec.c, spec.alpha);
      break;
    case PenaltyRule::Simple:
      out.lambda = penalty_simple(x.n(), x.p(), spec.c);
      break;
    case PenaltyRule::Refined: {
      const RefinedPenalty refined = penalty_refined(x, spec.c, spec.alpha, spec.q);
      out.lambda = refined.lambda;
      out.moment = refined.moment;
      if (!refined.moment.admissible) {
        out.warnings.emplace_back(
            "refined penalty: quantile exceeds (q - 2) sqrt(log n); moment condition not met");
      }
      break;
    }
    case PenaltyRule::MonteCarloQuantile:
      out.lambda = mc_quantile_penalty(x, spec.c, spec.alpha, spec.mc_reps, spec.seed);
      break;
    case PenaltyRule::Fixed:
      out.lambda = *spec.fixed_value;
      break;
    case PenaltyRule::Default:
      out.lambda = penalty_default(x.n(), x.p());
      break;
  }
  out.dead_columns = screening_check(x, out.lambda);
  if (!out.dead_columns.empty()) {
    out.warnings.emplace_back(std::to_string(out.dead_columns.size()) +
                              " column(s) have ||X_j||_1 < lambda and are screened out; the "
                              "penalty may be too large");
  }
  return out;
}

}  // namespace plad
