#include <algorithm>
#include <cmath>
#include <vector>

#include "plad/lad_solver.hpp"
#include "plad/lp.hpp"
#include "solver_internal.hpp"

namespace plad {
namespace {

// Free rows with a single nonzero entry (the pseudo-observations) can cancel
// up to |x_ij| of coordinate j on their own; they are folded into per-
// coordinate slack instead of becoming LP variables.
struct FreeRows {
  std::vector<Index> dense;
  Vector slack;
};

Index single_nonzero(const Matrix& xa, Index i) {
  Index where = -1;
  for (Index j = 0; j < xa.cols(); ++j) {
    if (xa(i, j) != 0.0) {
      if (where >= 0) return -1;
      where = j;
    }
  }
  return where;
}

double minimize_gap(const Matrix& xa, const Vector& fixed, const FreeRows& free_rows, double tol) {
  const Index p = xa.cols();
  const Index nf = static_cast<Index>(free_rows.dense.size());
  const auto excess = [&](const Vector& v) {
    return (v.cwiseAbs() - free_rows.slack).cwiseMax(0.0).maxCoeff();
  };
  if (nf == 0) return p > 0 ? excess(fixed) : 0.0;

  Matrix xf_t(p, nf);  // X_F'
  for (Index k = 0; k < nf; ++k) {
    xf_t.col(k) = xa.row(free_rows.dense[static_cast<std::size_t>(k)]).transpose();
  }

  // Minimum-norm solve of X_F' d = -fixed, accepted only when it already
  // certifies optimality inside the box.
  const Vector d = xf_t.completeOrthogonalDecomposition().solve(-fixed);
  if (d.lpNorm<Eigen::Infinity>() <= 1.0) {
    const double residual = excess(fixed + xf_t * d);
    if (residual <= tol) return residual;
  }

  // min t  s.t.  -(t + slack) <= fixed + X_F'(e - 1) <= t + slack,  0 <= e <= 2
  lp::Problem aux;
  aux.a = Matrix::Zero(2 * p + nf, nf + 1);
  aux.b = Vector::Zero(2 * p + nf);
  aux.c = Vector::Zero(nf + 1);
  aux.c[nf] = 1.0;
  const Vector h = xf_t.rowwise().sum() - fixed;
  aux.a.block(0, 0, p, nf) = xf_t;
  aux.a.block(0, nf, p, 1).setConstant(-1.0);
  aux.b.head(p) = h + free_rows.slack;
  aux.a.block(p, 0, p, nf) = -xf_t;
  aux.a.block(p, nf, p, 1).setConstant(-1.0);
  aux.b.segment(p, p) = free_rows.slack - h;
  aux.a.block(2 * p, 0, nf, nf).setIdentity();
  aux.b.tail(nf).setConstant(2.0);
  aux.relations.assign(static_cast<std::size_t>(2 * p + nf), lp::Relation::LessEqual);

  const lp::Solution sol = lp::solve(aux);
  if (sol.status != lp::Status::Optimal) {
    throw SolverError("kkt_gap: auxiliary LP did not reach optimality");
  }
  return sol.objective;
}

}  // namespace

// Works on the materialized X_aug so it shares no code path with the solvers.
double kkt_gap(const AugmentedProblem& problem, const Vector& gamma, double tol) {
  return detail::kkt_gap_with_candidate(problem, gamma, tol, nullptr);
}

double detail::kkt_gap_with_candidate(const AugmentedProblem& problem, const Vector& gamma,
                                      double tol, const Vector* candidate) {
  if (gamma.size() != problem.p()) throw DimensionMismatch("kkt_gap: gamma must have length p");
  const Matrix xa = problem.x_aug();
  const Vector r = problem.y_aug() - xa * gamma;
  const Index p = problem.p();

  Vector fixed = Vector::Zero(p);
  FreeRows free_rows{{}, Vector::Zero(p)};
  std::vector<char> is_free(static_cast<std::size_t>(xa.rows()), 0);
  for (Index i = 0; i < xa.rows(); ++i) {
    if (std::abs(r[i]) > tol) {
      fixed += (r[i] > 0.0 ? 1.0 : -1.0) * xa.row(i).transpose();
      continue;
    }
    is_free[static_cast<std::size_t>(i)] = 1;
    const Index j = single_nonzero(xa, i);
    if (j >= 0) {
      free_rows.slack[j] += std::abs(xa(i, j));
    } else if (!xa.row(i).isZero()) {
      free_rows.dense.push_back(i);
    }
  }

  // A candidate certificate is accepted if it respects every fixed sign and
  // the box on free rows, and leaves ||X_aug' d||_inf within tol.
  if (candidate != nullptr && candidate->size() <= xa.rows()) {
    bool consistent = true;
    Vector d = Vector::Zero(xa.rows());
    for (Index i = 0; i < candidate->size() && consistent; ++i) {
      const double di = (*candidate)[i];
      if (is_free[static_cast<std::size_t>(i)]) {
        d[i] = std::clamp(di, -1.0, 1.0);
      } else {
        d[i] = r[i] > 0.0 ? 1.0 : -1.0;
        consistent = di == d[i];
      }
    }
    for (Index i = candidate->size(); i < xa.rows() && consistent; ++i) {
      // Rows beyond the candidate are inactive zero rows.
      consistent = is_free[static_cast<std::size_t>(i)] != 0;
    }
    if (consistent) {
      const double gap = (xa.transpose() * d).lpNorm<Eigen::Infinity>();
      if (gap <= tol) return gap;
    }
  }
  return minimize_gap(xa, fixed, free_rows, tol);
}

}  // namespace plad
