#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plad/core_model.hpp"
#include "plad/noise.hpp"

namespace plad {

enum class EstimateMethod { BruteForce, MonteCarlo };
const char* to_string(EstimateMethod method) noexcept;

/// Extremes of ||X d||_2^2 / ||d||_2^2 over k-sparse d.
struct SparseEigenBounds {
  Index k = 0;
  double lambda_u = 0.0;
  double lambda_l = 0.0;
  EstimateMethod method = EstimateMethod::BruteForce;
  std::int64_t samples = 0;  // subsets examined
};

/// Brute force over all C(p, k) subsets when that count is <= budget,
/// otherwise `budget` random subsets plus two greedy subsets.
SparseEigenBounds sparse_eigen_bounds(const DesignMatrix& x, Index k, std::int64_t budget = 50000,
                                      std::uint64_t seed = 0);

/// Extremes over sampled cone directions of
///   kappa = ||X h||_1 / (n ||h_T||_2)   and   eta = ||X h||_2 / (sqrt(n) ||h_T||_2).
/// The minima are optimistic: sampling can only miss worse directions.
struct RestrictedEigenvalues {
  Index k = 0;
  double c_bar = 0.0;
  double kappa_l = 0.0;
  double kappa_u = 0.0;
  double eta_l = 0.0;
  double eta_u = 0.0;
  EstimateMethod method = EstimateMethod::MonteCarlo;
  std::int64_t samples = 0;
  bool optimistic = true;
};

struct ConeRatios {
  double kappa = 0.0;
  double eta = 0.0;
};

/// Ratios for one direction h with designated support T. h_T must be nonzero.
ConeRatios cone_ratios(const DesignMatrix& x, const Vector& h, const std::vector<Index>& support);

/// Sample s draws T (|T| uniform in 1..k), log-uniform magnitudes with random
/// signs on T, and a random sparse off-support part with
/// ||h_{T^c}||_1 = u ||h_T||_1 / c_bar, u ~ U[0, 1]. Sample s depends only on
/// (seed, s), so extra samples refine the extremes monotonically.
RestrictedEigenvalues restricted_eigenvalues(const DesignMatrix& x, Index k, double c_bar,
                                             std::int64_t samples, std::uint64_t seed);

class NonpositiveEta : public Error {
 public:
  using Error::Error;
};

struct TheoremBoundReport {
  double c = 0.0;
  double c_bar = 0.0;
  double a = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;  // 1 + 2 C2 sqrt(lambda_u)
  double lambda = 0.0;
  double condition_lhs = 0.0;  // (3 sqrt(n) / 16) kappa_l
  double condition_rhs = 0.0;  // lambda sqrt(k/n) + C1 sqrt(2k log p)(1.25 + 1/c_bar)
  bool condition_i_holds = false;
  double error_bound = 0.0;
  double probability_floor = 0.0;  // 1 - 2 p^{-4k(C2^2 - 1) + 1}
  std::optional<bool> noiseless_condition;
  bool optimistic = true;  // restricted minima come from sampling
};

/// Closed-form evaluation of the error bound and its side conditions.
/// `re_at_cbar1` (restricted eigenvalues with c_bar = 1) enables the
/// noiseless recovery condition. Throws NonpositiveEta if re.eta_l <= 0.
TheoremBoundReport evaluate_theorem_bound(Index n, Index p, Index k, double c, double a,
                                          double c2, const SparseEigenBounds& bounds,
                                          const RestrictedEigenvalues& re, double lambda,
                                          const RestrictedEigenvalues* re_at_cbar1 = nullptr);

/// lambda < n kappa_l(1). Requires re.c_bar == 1.
bool noiseless_recovery_condition(double lambda, Index n, const RestrictedEigenvalues& re);

/// G(x) = sum_i |x_i| min(|x_i|, U).
double g_function(const Vector& x, double upper);
/// G(x) >= U ||x||_1 / 2 when ||x||_1 >= n U / 2, else G(x) >= ||x||_1^2 / n.
/// The second branch is what the exchange argument proves; the sharper
/// ||x||_2^2 form only holds when ||x||_inf <= U.
bool g_function_bound_holds(const Vector& x, double upper);
/// Same, with ||x||_2^2 in the second branch. Fails e.g. for n = 20, U = 1,
/// x = 5 e_1.
bool g_function_literal_bound_holds(const Vector& x, double upper);

struct NormGapCheck {
  bool lemma = false;   // ||x||_2 - ||x||_1/sqrt(n) <= (sqrt(n)/4)(max x_i - min x_i)
  bool remark = false;  // ||x||_2 <= ||x||_1/sqrt(n) + sqrt(n) ||x||_inf / 4
  bool holds() const noexcept { return lemma && remark; }
};
NormGapCheck norm_gap_inequality(const Vector& x);

/// Block form: with S_0 the k largest |h_j| and S_1, S_2, ... the next
/// blocks of k in decreasing order, sum_{i>=1} ||h_{S_i}||_2 <=
/// (1/4 + 1/c_bar) ||h_{S_0}||_2 whenever ||h_{S_0}||_1 >= c_bar ||h_{S_0^c}||_1.
struct BlockNormCheck {
  bool in_cone = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;  // vacuously true outside the cone
};
BlockNormCheck block_norm_inequality(const Vector& h, Index k, double c_bar);

/// Monte-Carlo probe of M(d) = E(||X d + z||_1 - ||z||_1) / sqrt(n) and of
/// the spread B(d) = |sample - mean|.
struct GapProbe {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> levels;               // 0.5, 0.9, 0.95, 0.99
  std::vector<double> deviation_quantiles;  // quantiles of B(d) at `levels`
};
GapProbe empirical_gap_probe(const DesignMatrix& x, const Vector& d, const NoiseModel& noise,
                             int reps, std::uint64_t seed);

}  // namespace plad
