#include "plad/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "plad/parallel.hpp"
#include "plad/rng.hpp"

namespace plad {
namespace {

constexpr std::size_t kChunk = 256;

double binomial(Index p, Index k) {
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) out = out * static_cast<double>(p - k + i) / static_cast<double>(i);
  return out;
}

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double lo_value, double hi_value) {
    lo = std::min(lo, lo_value);
    hi = std::max(hi, hi_value);
  }
};

Extremes subset_extremes(const Matrix& gram, const std::vector<Index>& subset) {
  const auto k = static_cast<Index>(subset.size());
  if (k == 1) return {gram(subset[0], subset[0]), gram(subset[0], subset[0])};
  Matrix sub(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) sub(a, b) = gram(subset[static_cast<std::size_t>(a)],
                                                   subset[static_cast<std::size_t>(b)]);
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sub, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues()[0], eig.eigenvalues()[k - 1]};
}

// Grows a subset one column at a time, each time taking the column that
// pushes the chosen extreme furthest.
Extremes greedy_subset(const Matrix& gram, Index k, bool upper) {
  const Index p = gram.rows();
  std::vector<Index> subset;
  Index a0 = 0;
  Index b0 = 1;
  double best = -1.0;
  for (Index a = 0; a < p; ++a) {
    for (Index b = a + 1; b < p; ++b) {
      if (std::abs(gram(a, b)) > best) {
        best = std::abs(gram(a, b));
        a0 = a;
        b0 = b;
      }
    }
  }
  subset = {a0, b0};
  std::vector<char> used(static_cast<std::size_t>(p), 0);
  used[static_cast<std::size_t>(a0)] = used[static_cast<std::size_t>(b0)] = 1;
  while (static_cast<Index>(subset.size()) < k) {
    Index pick = -1;
    double pick_value = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      subset.push_back(j);
      const Extremes e = subset_extremes(gram, subset);
      subset.pop_back();
      const double value = upper ? e.hi : -e.lo;
      if (pick < 0 || value > pick_value) {
        pick = j;
        pick_value = value;
      }
    }
    subset.push_back(pick);
    used[static_cast<std::size_t>(pick)] = 1;
  }
  return subset_extremes(gram, subset);
}

// First m entries of a seeded partial Fisher-Yates shuffle of 0..p-1.
std::vector<Index> random_subset(Rng& rng, std::vector<Index>& scratch, Index m) {
  std::iota(scratch.begin(), scratch.end(), Index{0});
  const auto p = static_cast<std::uint64_t>(scratch.size());
  for (Index i = 0; i < m; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(rng.below(p - static_cast<std::uint64_t>(i)));
    std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
  }
  return {scratch.begin(), scratch.begin() + m};
}

double quantile(std::vector<double> values, double level) {
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

bool leq(double lhs, double rhs, double scale) { return lhs <= rhs + 1e-12 * (1.0 + scale); }

}  // namespace

const char* to_string(EstimateMethod method) noexcept {
  return method == EstimateMethod::BruteForce ? "brute_force" : "monte_carlo";
}

SparseEigenBounds sparse_eigen_bounds(const DesignMatrix& x, Index k, std::int64_t budget,
                                      std::uint64_t seed) {
  const Index p = x.p();
  if (k < 1 || k > std::min(x.n(), p)) throw DomainError("sparse_eigen_bounds: need 1 <= k <= min(n, p)");
  if (budget < 1) throw DomainError("sparse_eigen_bounds: budget must be positive");
  const Matrix gram = x.values().transpose() * x.values();

  SparseEigenBounds out;
  out.k = k;
  Extremes total;
  if (binomial(p, k) <= static_cast<double>(budget)) {
    out.method = EstimateMethod::BruteForce;
    std::vector<Index> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), Index{0});
    while (true) {
      const Extremes e = subset_extremes(gram, subset);
      total.add(e.lo, e.hi);
      ++out.samples;
      // Next combination in lexicographic order.
      Index i = k - 1;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == p - k + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) {
        subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  } else {
    out.method = EstimateMethod::MonteCarlo;
    const auto count = static_cast<std::size_t>(budget);
    std::vector<Extremes> per_chunk((count + kChunk - 1) / kChunk);
    parallel_for(per_chunk.size(), [&](std::size_t chunk) {
      std::vector<Index> scratch(static_cast<std::size_t>(p));
      for (std::size_t s = chunk * kChunk; s < std::min(count, (chunk + 1) * kChunk); ++s) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
        const Extremes e = subset_extremes(gram, random_subset(rng, scratch, k));
        per_chunk[chunk].add(e.lo, e.hi);
      }
    });
    for (const Extremes& e : per_chunk) total.add(e.lo, e.hi);
    out.samples = budget;
    if (k >= 2) {
      const Extremes up = greedy_subset(gram, k, true);
      const Extremes down = greedy_subset(gram, k, false);
      total.add(down.lo, up.hi);
      out.samples += 2;
    }
  }
  out.lambda_l = std::max(0.0, total.lo);
  out.lambda_u = total.hi;
  return out;
}

ConeRatios cone_ratios(const DesignMatrix& x, const Vector& h, const std::vector<Index>& support) {
  if (h.size() != x.p()) throw DimensionMismatch("cone_ratios: h must have length p");
  double on_support = 0.0;
  for (Index j : support) on_support += h[j] * h[j];
  on_support = std::sqrt(on_support);
  if (!(on_support > 0.0)) throw DomainError("cone_ratios: h_T must be nonzero");
  const Vector xh = x.values() * h;
  const auto n = static_cast<double>(x.n());
  return {xh.lpNorm<1>() / (n * on_support), xh.norm() / (std::sqrt(n) * on_support)};
}

RestrictedEigenvalues restricted_eigenvalues(const DesignMatrix& x, Index k, double c_bar,
                                             std::int64_t samples, std::uint64_t seed) {
  const Index p = x.p();
  if (k < 1 || k > p) throw DomainError("restricted_eigenvalues: need 1 <= k <= p");
  if (!(c_bar > 0.0 && c_bar <= 1.0)) throw DomainError("restricted_eigenvalues: c_bar in (0, 1]");
  if (samples < 1000) throw DomainError("restricted_eigenvalues: at least 1000 samples");

  const auto count = static_cast<std::size_t>(samples);
  std::vector<ConeRatios> ratios(count);
  parallel_for((count + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    std::vector<Index> scratch(static_cast<std::size_t>(p));
    Vector h(p);
    for (std::size_t s = chunk * kChunk; s < std::min(count, (chunk + 1) * kChunk); ++s) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
      const auto t = static_cast<Index>(1 + rng.below(static_cast<std::uint64_t>(k)));
      const Index rest = p - t;
      Index m = 0;
      if (rest > 0) {
        const double draw = std::exp(rng.uniform() * std::log(static_cast<double>(rest) + 1.0));
        m = std::clamp<Index>(static_cast<Index>(draw), 1, rest);
      }
      const std::vector<Index> picked = random_subset(rng, scratch, t + m);

      h.setZero();
      double mass_t = 0.0;
      for (Index i = 0; i < t; ++i) {
        const double v = rng.rademacher() * std::exp(rng.uniform(std::log(1e-2), 0.0));
        h[picked[static_cast<std::size_t>(i)]] = v;
        mass_t += std::abs(v);
      }
      const double u = rng.uniform();
      double mass_off = 0.0;
      for (Index i = t; i < t + m; ++i) {
        const double v = rng.normal();
        h[picked[static_cast<std::size_t>(i)]] = v;
        mass_off += std::abs(v);
      }
      if (mass_off > 0.0) {
        const double scale = u * mass_t / c_bar / mass_off;
        for (Index i = t; i < t + m; ++i) h[picked[static_cast<std::size_t>(i)]] *= scale;
      }
      ratios[s] = cone_ratios(x, h, {picked.begin(), picked.begin() + t});
    }
  });

  RestrictedEigenvalues out;
  out.k = k;
  out.c_bar = c_bar;
  out.samples = samples;
  Extremes kappa;
  Extremes eta;
  for (const ConeRatios& r : ratios) {
    kappa.add(r.kappa, r.kappa);
    eta.add(r.eta, r.eta);
  }
  out.kappa_l = kappa.lo;
  out.kappa_u = kappa.hi;
  out.eta_l = eta.lo;
  out.eta_u = eta.hi;
  return out;
}

TheoremBoundReport evaluate_theorem_bound(Index n, Index p, Index k, double c, double a,
                                          double c2, const SparseEigenBounds& bounds,
                                          const RestrictedEigenvalues& re, double lambda,
                                          const RestrictedEigenvalues* re_at_cbar1) {
  if (!(c > 1.0)) throw DomainError("evaluate_theorem_bound: c must exceed 1");
  if (!(c2 > 1.0)) throw DomainError("evaluate_theorem_bound: C2 must exceed 1");
  if (!(a > 0.0)) throw DomainError("evaluate_theorem_bound: a must be positive");
  if (n < 1 || p < 2 || k < 1) throw DomainError("evaluate_theorem_bound: invalid dimensions");
  if (!(re.eta_l > 0.0)) throw NonpositiveEta("evaluate_theorem_bound: eta_l must be positive");

  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  const double log_p = std::log(static_cast<double>(p));

  TheoremBoundReport out;
  out.c = c;
  out.c_bar = (c - 1.0) / (c + 1.0);
  out.a = a;
  out.c2 = c2;
  out.lambda = lambda;
  out.c1 = 1.0 + 2.0 * c2 * std::sqrt(bounds.lambda_u);
  out.condition_lhs = 3.0 * std::sqrt(nd) / 16.0 * re.kappa_l;
  out.condition_rhs = lambda * std::sqrt(kd / nd) +
                      out.c1 * std::sqrt(2.0 * kd * log_p) * (1.25 + 1.0 / out.c_bar);
  out.condition_i_holds = out.condition_lhs > out.condition_rhs;
  out.error_bound = std::sqrt(2.0 * kd * log_p / nd) * 16.0 *
                    (c * std::numbers::sqrt2 + 1.25 * out.c1 + out.c1 / out.c_bar) /
                    (a * re.eta_l) * std::sqrt(1.0 + 1.0 / out.c_bar);
  out.probability_floor =
      1.0 - 2.0 * std::pow(static_cast<double>(p), -4.0 * kd * (c2 * c2 - 1.0) + 1.0);
  if (re_at_cbar1 != nullptr) {
    out.noiseless_condition = noiseless_recovery_condition(lambda, n, *re_at_cbar1);
  }
  out.optimistic = re.optimistic;
  return out;
}

bool noiseless_recovery_condition(double lambda, Index n, const RestrictedEigenvalues& re) {
  if (std::abs(re.c_bar - 1.0) > 1e-12) {
    throw DomainError("noiseless_recovery_condition: restricted eigenvalues need c_bar = 1");
  }
  return lambda < static_cast<double>(n) * re.kappa_l;
}

double g_function(const Vector& x, double upper) {
  if (!(upper > 0.0)) throw DomainError("g_function: U must be positive");
  return (x.array().abs() * x.array().abs().min(upper)).sum();
}

namespace {

bool g_bound(const Vector& x, double upper, bool literal) {
  const double g = g_function(x, upper);
  const double l1 = x.lpNorm<1>();
  const double n = static_cast<double>(x.size());
  double bound = 0.0;
  if (l1 >= n * upper / 2.0) {
    bound = upper * l1 / 2.0;
  } else {
    bound = literal ? x.squaredNorm() : l1 * l1 / n;
  }
  return g >= bound - 1e-12 * (1.0 + bound);
}

}  // namespace

bool g_function_bound_holds(const Vector& x, double upper) { return g_bound(x, upper, false); }

bool g_function_literal_bound_holds(const Vector& x, double upper) { return g_bound(x, upper, true); }

NormGapCheck norm_gap_inequality(const Vector& x) {
  NormGapCheck out;
  if (x.size() == 0) {
    out.lemma = out.remark = true;
    return out;
  }
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  const double l2 = x.norm();
  const double l1_scaled = x.lpNorm<1>() / root_n;
  const double inf = x.lpNorm<Eigen::Infinity>();
  out.lemma = leq(l2 - l1_scaled, root_n / 4.0 * (x.maxCoeff() - x.minCoeff()), l2);
  out.remark = leq(l2, l1_scaled + root_n * inf / 4.0, l2);
  return out;
}

BlockNormCheck block_norm_inequality(const Vector& h, Index k, double c_bar) {
  if (k < 1) throw DomainError("block_norm_inequality: k must be positive");
  if (!(c_bar > 0.0)) throw DomainError("block_norm_inequality: c_bar must be positive");
  std::vector<double> mags(static_cast<std::size_t>(h.size()));
  for (Index j = 0; j < h.size(); ++j) mags[static_cast<std::size_t>(j)] = std::abs(h[j]);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  const auto kk = std::min(static_cast<std::size_t>(k), mags.size());
  double head_l1 = 0.0;
  double head_sq = 0.0;
  for (std::size_t i = 0; i < kk; ++i) {
    head_l1 += mags[i];
    head_sq += mags[i] * mags[i];
  }
  double tail_l1 = 0.0;
  BlockNormCheck out;
  for (std::size_t start = kk; start < mags.size(); start += static_cast<std::size_t>(k)) {
    double block_sq = 0.0;
    for (std::size_t i = start; i < std::min(mags.size(), start + static_cast<std::size_t>(k)); ++i) {
      block_sq += mags[i] * mags[i];
      tail_l1 += mags[i];
    }
    out.lhs += std::sqrt(block_sq);
  }
  out.rhs = (0.25 + 1.0 / c_bar) * std::sqrt(head_sq);
  out.in_cone = head_l1 >= c_bar * tail_l1;
  out.holds = !out.in_cone || leq(out.lhs, out.rhs, out.rhs);
  return out;
}

GapProbe empirical_gap_probe(const DesignMatrix& x, const Vector& d, const NoiseModel& noise,
                             int reps, std::uint64_t seed) {
  if (d.size() != x.p()) throw DimensionMismatch("empirical_gap_probe: d must have length p");
  if (reps < 1000) throw DomainError("empirical_gap_probe: at least 1000 reps");
  const Vector xd = x.values() * d;
  const double root_n = std::sqrt(static_cast<double>(x.n()));
  std::vector<double> values(static_cast<std::size_t>(reps));
  parallel_for(values.size(), [&](std::size_t r) {
    const Vector z = sample(noise, x.n(), derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    values[r] = ((xd + z).lpNorm<1>() - z.lpNorm<1>()) / root_n;
  });

  GapProbe out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / reps;
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(var / (reps - 1) / reps);
  std::vector<double> deviations(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) deviations[r] = std::abs(values[r] - out.mean);
  out.levels = {0.5, 0.9, 0.95, 0.99};
  for (double level : out.levels) out.deviation_quantiles.push_back(quantile(deviations, level));
  return out;
}

}  // namespace plad
