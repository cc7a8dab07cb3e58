#include <cmath>

#include <benchmark/benchmark.h>

#include "plad/diagnostics.hpp"
#include "plad/lad_solver.hpp"
#include "plad/lasso.hpp"
#include "plad/noise.hpp"
#include "plad/penalty.hpp"
#include "plad/rng.hpp"

namespace {

using namespace plad;

struct Instance {
  DesignMatrix x;
  Vector y;
  double lambda;
};

Instance make_instance(Index n, Index p, double sigma) {
  Rng rng(derive_seed(7, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p)}));
  Matrix raw(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) raw(i, j) = rng.normal();
  }
  DesignMatrix x = normalize_columns(raw);
  Vector beta = Vector::Zero(p);
  beta.head(5).setConstant(3.0);
  Vector y = x.values() * beta;
  for (Index i = 0; i < n; ++i) y[i] += sigma * rng.normal();
  return {std::move(x), std::move(y), penalty_default(n, p)};
}

void fit_with(benchmark::State& state, SolverBackend backend, double sigma) {
  const Instance inst = make_instance(state.range(0), 2 * state.range(0), sigma);
  SolverOptions options;
  options.backend = backend;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_plad(inst.x, inst.y, inst.lambda, options).objective);
  }
}

void BM_FitInteriorPoint(benchmark::State& state) { fit_with(state, SolverBackend::InteriorPoint, 1.0); }
void BM_FitSimplex(benchmark::State& state) { fit_with(state, SolverBackend::Simplex, 1.0); }
void BM_FitTableau(benchmark::State& state) { fit_with(state, SolverBackend::Tableau, 1.0); }
void BM_FitNoiseless(benchmark::State& state) { fit_with(state, SolverBackend::InteriorPoint, 0.0); }

void BM_KktVerifier(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2 * state.range(0), 1.0);
  const FitResult fit = fit_plad(inst.x, inst.y, inst.lambda);
  const AugmentedProblem problem = augment(inst.x, inst.y, inst.lambda);
  for (auto _ : state) benchmark::DoNotOptimize(kkt_gap(problem, fit.coefficients.beta, 1e-8));
}

void BM_Lasso(benchmark::State& state) {
  const Instance inst = make_instance(state.range(0), 2 * state.range(0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_lasso(inst.x, inst.y, inst.lambda).objective);
}

void BM_MonteCarloPenalty(benchmark::State& state) {
  const Instance inst = make_instance(200, 400, 1.0);
  const auto reps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc_quantile_penalty(inst.x, 1.1, 0.05, reps, 1));
}

void BM_RestrictedEigenvalues(benchmark::State& state) {
  const Instance inst = make_instance(200, 400, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(restricted_eigenvalues(inst.x, 5, 1.0 / 21.0, state.range(0), 3).kappa_l);
  }
}

void BM_CertifyScale(benchmark::State& state) {
  const NoiseModel model = NoiseModel::make(NoiseFamily::HeteroMixture);
  for (auto _ : state) benchmark::DoNotOptimize(certify_scale_parameter(model));
}

}  // namespace

BENCHMARK(BM_FitInteriorPoint)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitSimplex)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitTableau)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitNoiseless)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KktVerifier)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lasso)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloPenalty)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RestrictedEigenvalues)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyScale)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
