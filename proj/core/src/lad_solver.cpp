#include "plad/lad_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "plad/lp.hpp"
#include "plad/rng.hpp"
#include "solver_internal.hpp"

namespace plad {
namespace {

std::vector<Index> penalty_rows(const AugmentedProblem& problem) {
  std::vector<Index> rows(static_cast<std::size_t>(problem.p()));
  std::iota(rows.begin(), rows.end(), problem.n());
  return rows;
}

// Small deterministic perturbation of the right-hand side; it removes ties
// between residuals so every pivot strictly decreases the objective.
Vector perturbed(const AugmentedProblem& problem, const Vector& target, double relative) {
  Rng rng(derive_seed(0x5eed1ad5ULL, {static_cast<std::uint64_t>(problem.n()),
                                      static_cast<std::uint64_t>(problem.p())}));
  const double scale = relative * (1.0 + target.lpNorm<Eigen::Infinity>());
  Vector out = target;
  for (Index i = 0; i < out.size(); ++i) out[i] += scale * rng.uniform(-1.0, 1.0);
  return out;
}

// Descent on the perturbed target, then on the exact target from the
// resulting basis so the returned vertex interpolates the original data.
detail::VertexOutcome descend(const AugmentedProblem& problem, const Vector& target,
                              std::vector<Index> basis, const SolverOptions& options) {
  detail::VertexOutcome rough = detail::vertex_descent(
      problem, perturbed(problem, target, options.perturbation), std::move(basis),
      options.max_pivots);
  detail::VertexOutcome exact =
      detail::vertex_descent(problem, target, std::move(rough.basis), options.max_pivots);
  // With no further pivots the perturbed certificate carries over: rows
  // whose residual sign it fixes are exactly the ones left nonzero.
  if (exact.pivots == 0 && rough.optimal) exact.dual = std::move(rough.dual);
  exact.pivots += rough.pivots;
  return exact;
}

Vector solve_split_tableau(const AugmentedProblem& problem, const Vector& target, int& pivots) {
  const Index m = target.size();
  const Index p = problem.p();
  // Variables: gamma+ (p), gamma- (p), u (m), v (m).
  lp::Problem split;
  split.a = Matrix::Zero(m, 2 * p + 2 * m);
  split.a.block(0, 0, problem.n(), p) = problem.x;
  if (m > problem.n()) {
    split.a.block(problem.n(), 0, p, p).diagonal().setConstant(problem.lambda);
  }
  split.a.block(0, p, m, p) = -split.a.block(0, 0, m, p);
  split.a.block(0, 2 * p, m, m).setIdentity();
  split.a.block(0, 2 * p + m, m, m) = -Matrix::Identity(m, m);
  split.b = target;
  split.relations.assign(static_cast<std::size_t>(m), lp::Relation::Equal);
  split.c = Vector::Zero(2 * p + 2 * m);
  split.c.tail(2 * m).setOnes();

  const lp::Solution sol = lp::solve(split);
  pivots = sol.pivots;
  if (sol.status != lp::Status::Optimal) throw SolverError("tableau simplex failed");
  return sol.x.head(p) - sol.x.segment(p, p);
}

}  // namespace

const char* to_string(SolverStatus status) noexcept {
  switch (status) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::IterationLimit: return "IterationLimit";
    case SolverStatus::Degenerate: return "Degenerate";
  }
  return "?";
}

const char* to_string(SolverBackend backend) noexcept {
  switch (backend) {
    case SolverBackend::InteriorPoint: return "interior-point";
    case SolverBackend::Simplex: return "simplex";
    case SolverBackend::Tableau: return "tableau";
  }
  return "?";
}

Matrix AugmentedProblem::x_aug() const {
  Matrix out = Matrix::Zero(rows(), p());
  out.topRows(n()) = x;
  out.bottomRows(p()).diagonal().setConstant(lambda);
  return out;
}

Vector AugmentedProblem::y_aug() const {
  Vector out = Vector::Zero(rows());
  out.head(n()) = y;
  return out;
}

double AugmentedProblem::objective(const Vector& gamma) const {
  return (y - x * gamma).lpNorm<1>() + (lambda * gamma).lpNorm<1>();
}

AugmentedProblem augment(const DesignMatrix& x, const Vector& y, double lambda) {
  if (y.size() != x.n()) throw DimensionMismatch("augment: y must have length n");
  if (!(lambda >= 0.0)) throw DomainError("augment: lambda must be nonnegative");
  return AugmentedProblem{x.values(), y, lambda};
}

FitResult solve_lad(const AugmentedProblem& problem, const SolverOptions& options) {
  if (problem.y.size() != problem.n()) throw DimensionMismatch("solve_lad: y must have length n");
  if (!(problem.lambda >= 0.0)) throw DomainError("solve_lad: lambda must be nonnegative");
  if (!(options.tol > 0.0)) throw DomainError("solve_lad: tol must be positive");

  const Vector target = detail::active_target(problem);
  FitResult out;
  out.lambda = problem.lambda;
  out.interior_objective = std::numeric_limits<double>::quiet_NaN();
  Vector gamma;
  Vector candidate;

  switch (options.backend) {
    case SolverBackend::InteriorPoint: {
      const auto ipm = detail::frisch_newton(problem, target, options.max_ipm_iterations);
      out.interior_objective = problem.objective(ipm.gamma);
      if (!ipm.converged) out.warnings.emplace_back("interior point did not converge; crossover continues");
      // Crossover: start the vertex descent from the rows the interior
      // solution nearly interpolates.
      const Vector r = detail::active_residuals(problem, target, ipm.gamma);
      std::vector<Index> order(static_cast<std::size_t>(target.size()));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return std::abs(r[a]) < std::abs(r[b]); });
      auto vertex = descend(problem, target, detail::select_basis(problem, order), options);
      gamma = std::move(vertex.gamma);
      candidate = std::move(vertex.dual);
      out.iterations = ipm.iterations + vertex.pivots;
      break;
    }
    case SolverBackend::Simplex: {
      std::vector<Index> start;
      if (problem.lambda > 0.0) {
        start = penalty_rows(problem);
      } else {
        std::vector<Index> order(static_cast<std::size_t>(problem.n()));
        std::iota(order.begin(), order.end(), Index{0});
        start = detail::select_basis(problem, order);
      }
      auto vertex = descend(problem, target, std::move(start), options);
      gamma = std::move(vertex.gamma);
      candidate = std::move(vertex.dual);
      out.iterations = vertex.pivots;
      break;
    }
    case SolverBackend::Tableau: {
      if (target.size() > 200) {
        out.warnings.emplace_back("tableau backend is intended for n + p <= 200");
      }
      gamma = solve_split_tableau(problem, target, out.iterations);
      break;
    }
  }

  out.residuals = problem.y - problem.x * gamma;
  out.objective = problem.objective(gamma);
  out.kkt_gap = detail::kkt_gap_with_candidate(problem, gamma, options.tol,
                                               candidate.size() > 0 ? &candidate : nullptr);

  Index vanishing = 0;
  const Vector r = detail::active_residuals(problem, target, gamma);
  for (Index i = 0; i < r.size(); ++i) {
    if (std::abs(r[i]) <= options.tol) ++vanishing;
  }
  if (out.kkt_gap > options.tol) {
    out.status = SolverStatus::IterationLimit;
    out.warnings.emplace_back("KKT certificate not met (gap " + std::to_string(out.kkt_gap) + ")");
  } else if (vanishing > problem.p()) {
    out.status = SolverStatus::Degenerate;
  } else {
    out.status = SolverStatus::Optimal;
  }
  out.coefficients = Coefficients::from_beta(std::move(gamma));
  return out;
}

FitResult fit_plad(const DesignMatrix& x, const Vector& y, double lambda,
                   const SolverOptions& options) {
  return solve_lad(augment(x, y, lambda), options);
}

FitResult refit_on_support(const DesignMatrix& x, const Vector& y, std::span<const Index> support,
                           const SolverOptions& options) {
  if (y.size() != x.n()) throw DimensionMismatch("refit_on_support: y must have length n");
  if (support.empty()) {
    FitResult out;
    out.coefficients = Coefficients::from_beta(Vector::Zero(x.p()));
    out.residuals = y;
    out.objective = y.lpNorm<1>();
    out.kkt_gap = 0.0;
    out.warnings.emplace_back("empty support: refit returns the zero vector");
    return out;
  }
  if (static_cast<Index>(support.size()) >= x.n()) {
    throw DomainError("refit_on_support: support must be smaller than n");
  }
  FitResult sub = solve_lad(augment(x.select_columns(support), y, 0.0), options);

  Vector beta = Vector::Zero(x.p());
  for (std::size_t c = 0; c < support.size(); ++c) {
    beta[support[c]] = sub.coefficients.beta[static_cast<Index>(c)];
  }
  sub.coefficients = Coefficients::from_beta(std::move(beta));
  return sub;
}

}  // namespace plad
