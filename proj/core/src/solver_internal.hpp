#pragma once

#include <span>
#include <vector>

#include "plad/lad_solver.hpp"

namespace plad::detail {

// Rows that carry information: the n observations, plus the p pseudo-rows
// when lambda > 0. With lambda == 0 the pseudo-rows are identically zero.
inline Index active_rows(const AugmentedProblem& problem) {
  return problem.lambda > 0.0 ? problem.rows() : problem.n();
}

// y_aug restricted to the active rows.
Vector active_target(const AugmentedProblem& problem);

// x_i' v for active row i.
inline double row_dot(const AugmentedProblem& problem, Index i, const Vector& v) {
  return i < problem.n() ? problem.x.row(i).dot(v) : problem.lambda * v[i - problem.n()];
}

// target - X_active gamma.
Vector active_residuals(const AugmentedProblem& problem, const Vector& target, const Vector& gamma);

struct InteriorPointOutcome {
  Vector gamma;
  int iterations = 0;
  bool converged = false;
};

// Frisch-Newton predictor-corrector method on the bounded dual
//   max target'd  s.t.  X_active' d = 0,  -1 <= d <= 1.
InteriorPointOutcome frisch_newton(const AugmentedProblem& problem, const Vector& target,
                                   int max_iterations);

// Picks p linearly independent active rows, preferring rows earlier in
// `priority`. Throws SolverError when the active rows do not span R^p.
std::vector<Index> select_basis(const AugmentedProblem& problem, std::span<const Index> priority);

struct VertexOutcome {
  Vector gamma;
  std::vector<Index> basis;
  // Candidate dual signs over the active rows: sign(r_i) off the basis and
  // the basic multipliers on it. Only meaningful when optimal.
  Vector dual;
  int pivots = 0;
  bool optimal = false;
};

// Barrodale-Roberts style descent over vertices: each pivot releases one
// basic row and moves along the edge to the weighted-median breakpoint.
VertexOutcome vertex_descent(const AugmentedProblem& problem, const Vector& target,
                             std::vector<Index> basis, int max_pivots);

// kkt_gap() that first tries to confirm a candidate dual vector (length
// active_rows); falls back to the auxiliary LP when the candidate fails.
double kkt_gap_with_candidate(const AugmentedProblem& problem, const Vector& gamma, double tol,
                              const Vector* candidate);

}  // namespace plad::detail
