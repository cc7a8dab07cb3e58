#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plad/core_model.hpp"

namespace plad {

enum class PenaltyRule {
  Asymptotic,          // c sqrt(2 A(alpha) n log p)
  Simple,              // 2c sqrt(n log p)
  Refined,             // c sqrt(n) Phi^{-1}(1 - alpha/(2p))
  MonteCarloQuantile,  // c times the (1 - alpha) quantile of ||X' I||_inf
  Fixed,
  Default,             // sqrt(2 n log p), used when no rule is requested
};

const char* to_string(PenaltyRule rule) noexcept;
/// Accepts asymptotic, simple, refined, mc, fixed, default. Throws DomainError.
PenaltyRule parse_penalty_rule(const std::string& name);

struct PenaltySpec {
  PenaltyRule rule = PenaltyRule::Default;
  double c = 1.1;
  double alpha = 0.05;
  std::optional<double> fixed_value;
  int mc_reps = 1000;
  std::uint64_t seed = 0;
  double q = 3.0;  // moment order for the refined rule

  /// Throws DomainError unless c > 1, 0 < alpha < 1 and fixed_value is set
  /// exactly when rule == Fixed.
  void validate() const;
};

struct MomentCondition {
  double q = 0.0;
  double b = 0.0;  // max_j ||X_j||_q^q / n
  bool admissible = false;
};

struct RefinedPenalty {
  double lambda = 0.0;
  MomentCondition moment;
};

struct PenaltyChoice {
  double lambda = 0.0;
  PenaltyRule rule = PenaltyRule::Default;
  std::optional<double> a_alpha;
  std::optional<MomentCondition> moment;
  std::vector<Index> dead_columns;
  std::vector<std::string> warnings;
};

/// Smallest A with 2 p^{-(A-1)} <= alpha: 1 + log(2/alpha) / log p.
double a_of_alpha(double alpha, Index p);

double penalty_asymptotic(Index n, Index p, double c, double alpha);
double penalty_simple(Index n, Index p, double c);
double penalty_default(Index n, Index p);

/// B = max_j ||X_j||_q^q / n, admissible iff Phi^{-1}(1 - alpha/2p) <= (q-2) sqrt(log n).
MomentCondition moment_condition(const DesignMatrix& x, double q, double alpha);
/// Inadmissible moment conditions are reported, not rejected.
RefinedPenalty penalty_refined(const DesignMatrix& x, double c, double alpha, double q);

/// ||X' I||_inf for `reps` Rademacher vectors; draw r uses seed derive_seed(seed, {r}).
std::vector<double> rademacher_sup_norms(const DesignMatrix& x, int reps, std::uint64_t seed);
/// c times the ceil((1 - alpha) reps)-th order statistic. Requires reps >= 100.
double mc_quantile_penalty(const DesignMatrix& x, double c, double alpha, int reps,
                           std::uint64_t seed);

/// Columns with ||X_j||_1 < lambda; those coefficients are forced to zero.
std::vector<Index> screening_check(const DesignMatrix& x, double lambda);

/// Evaluates the rule in `spec`, attaching screening results and warnings.
PenaltyChoice choose_penalty(const DesignMatrix& x, const PenaltySpec& spec);

}  // namespace plad
