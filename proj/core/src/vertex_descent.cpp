#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "solver_internal.hpp"

namespace plad::detail {
namespace {

constexpr int kRefactorEvery = 64;

Matrix basis_matrix(const AugmentedProblem& problem, std::span<const Index> basis) {
  const Index p = problem.p();
  Matrix xb = Matrix::Zero(p, p);
  for (Index k = 0; k < p; ++k) {
    const Index i = basis[static_cast<std::size_t>(k)];
    if (i < problem.n()) {
      xb.row(k) = problem.x.row(i);
    } else {
      xb(k, i - problem.n()) = problem.lambda;
    }
  }
  return xb;
}

Vector basis_target(const Vector& target, std::span<const Index> basis) {
  Vector tb(static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) tb[static_cast<Index>(k)] = target[basis[k]];
  return tb;
}

Matrix invert_basis(const AugmentedProblem& problem, std::span<const Index> basis) {
  const Eigen::PartialPivLU<Matrix> lu(basis_matrix(problem, basis));
  if (!(lu.rcond() > 1e-14)) throw SolverError("vertex descent: singular basis");
  return lu.inverse();
}

struct Breakpoint {
  double t;
  double weight;
  Index row;
};

}  // namespace

Vector active_target(const AugmentedProblem& problem) {
  Vector t = Vector::Zero(active_rows(problem));
  t.head(problem.n()) = problem.y;
  return t;
}

Vector active_residuals(const AugmentedProblem& problem, const Vector& target, const Vector& gamma) {
  Vector r = target;
  r.head(problem.n()).noalias() -= problem.x * gamma;
  if (target.size() > problem.n()) r.tail(problem.p()) -= problem.lambda * gamma;
  return r;
}

std::vector<Index> select_basis(const AugmentedProblem& problem, std::span<const Index> priority) {
  const Index p = problem.p();
  Matrix q(p, p);  // orthonormal rows accepted so far, stored as columns
  Index rank = 0;
  std::vector<Index> basis;
  basis.reserve(static_cast<std::size_t>(p));
  Vector v(p);
  for (Index i : priority) {
    if (rank == p) break;
    if (i < problem.n()) {
      v = problem.x.row(i).transpose();
    } else {
      v.setZero();
      v[i - problem.n()] = problem.lambda;
    }
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      v.noalias() -= q.leftCols(rank) * (q.leftCols(rank).transpose() * v);
    }
    const double norm = v.norm();
    if (norm <= 1e-9 * norm0) continue;
    q.col(rank++) = v / norm;
    basis.push_back(i);
  }
  if (rank < p) {
    throw SolverError("design rows do not span the coefficient space (rank " +
                      std::to_string(rank) + " < p = " + std::to_string(p) + ")");
  }
  return basis;
}

VertexOutcome vertex_descent(const AugmentedProblem& problem, const Vector& target,
                             std::vector<Index> basis, int max_pivots) {
  const Index n = problem.n();
  const Index p = problem.p();
  const Index m = target.size();

  std::vector<char> in_basis(static_cast<std::size_t>(m), 0);
  for (Index i : basis) in_basis[static_cast<std::size_t>(i)] = 1;

  Matrix binv = invert_basis(problem, basis);
  const double x_max = problem.x.size() > 0 ? problem.x.cwiseAbs().maxCoeff() : 0.0;
  const double row_scale = std::max(x_max, problem.lambda);

  VertexOutcome out;
  std::vector<Breakpoint> breaks;
  std::vector<Index> zero_rows;
  Vector signs(m);
  int since_refactor = 0;

  while (true) {
    const Vector gamma = binv * basis_target(target, basis);
    const Vector r = active_residuals(problem, target, gamma);
    const double ztol = 64.0 * std::numeric_limits<double>::epsilon() *
                        (target.lpNorm<Eigen::Infinity>() + row_scale * gamma.lpNorm<1>() + 1.0);

    zero_rows.clear();
    for (Index i = 0; i < m; ++i) {
      signs[i] = 0.0;
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      if (std::abs(r[i]) <= ztol) {
        zero_rows.push_back(i);
      } else {
        signs[i] = r[i] > 0.0 ? 1.0 : -1.0;
      }
    }
    Vector g = problem.x.transpose() * signs.head(n);
    if (m > n) g += problem.lambda * signs.tail(p);
    const Vector w = binv.transpose() * g;

    // Releasing basic row k in direction sigma * binv.col(k) has directional
    // derivative 1 - |w_k| + sum over zero rows of |x_i' delta|.
    std::vector<Index> candidates;
    for (Index k = 0; k < p; ++k) {
      if (std::abs(w[k]) > 1.0 + 1e-11) candidates.push_back(k);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](Index a, Index b) { return std::abs(w[a]) > std::abs(w[b]); });

    Index leave = -1;
    double slope = 0.0;
    Vector delta(p);
    for (Index k : candidates) {
      delta = (w[k] > 0.0 ? 1.0 : -1.0) * binv.col(k);
      double d = 1.0 - std::abs(w[k]);
      for (Index i : zero_rows) d += std::abs(row_dot(problem, i, delta));
      if (d < -1e-11) {
        leave = k;
        slope = d;
        break;
      }
    }
    if (leave < 0) {
      out.optimal = true;
      out.dual = signs;
      for (Index k = 0; k < p; ++k) out.dual[basis[static_cast<std::size_t>(k)]] = -w[k];
      break;
    }
    if (out.pivots >= max_pivots) break;

    // Weighted-median line search along delta.
    Vector moves(m);
    moves.head(n).noalias() = problem.x * delta;
    if (m > n) moves.tail(p) = problem.lambda * delta;
    breaks.clear();
    for (Index i = 0; i < m; ++i) {
      if (in_basis[static_cast<std::size_t>(i)] || signs[i] == 0.0 || moves[i] == 0.0) continue;
      const double t = r[i] / moves[i];
      if (t > 0.0) breaks.push_back({t, std::abs(moves[i]), i});
    }
    std::sort(breaks.begin(), breaks.end(), [](const Breakpoint& a, const Breakpoint& b) {
      return a.t < b.t || (a.t == b.t && a.row < b.row);
    });
    Index enter = -1;
    for (const Breakpoint& bp : breaks) {
      slope += 2.0 * bp.weight;
      if (slope >= 0.0) {
        enter = bp.row;
        break;
      }
    }
    if (enter < 0) throw SolverError("vertex descent: objective unbounded along an edge");

    // Row `leave` of the basis is replaced by row `enter`.
    const Vector column = binv.col(leave);
    const double denom = row_dot(problem, enter, column);
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
    in_basis[static_cast<std::size_t>(enter)] = 1;
    basis[static_cast<std::size_t>(leave)] = enter;
    ++out.pivots;

    if (++since_refactor >= kRefactorEvery || std::abs(denom) < 1e-10) {
      binv = invert_basis(problem, basis);
      since_refactor = 0;
    } else {
      Eigen::RowVectorXd u = enter < n ? Eigen::RowVectorXd(problem.x.row(enter) * binv)
                                       : Eigen::RowVectorXd(problem.lambda * binv.row(enter - n));
      u[leave] -= 1.0;
      binv.noalias() -= (column / denom) * u;
    }
  }

  // Final coefficients from a fresh factorization.
  const Eigen::PartialPivLU<Matrix> lu(basis_matrix(problem, basis));
  out.gamma = lu.solve(basis_target(target, basis));
  out.basis = std::move(basis);
  return out;
}

}  // namespace plad::detail
