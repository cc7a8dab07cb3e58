#include "plad/lp.hpp"

#include <cmath>
#include <limits>

namespace plad::lp {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr int kDegenerateStreakForBland = 50;

class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(RowMatrix::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  RowMatrix& t() { return t_; }
  std::vector<Index>& basis() { return basis_; }
  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  double rhs(Index r) const { return t_(r, cols()); }

  void pivot(Index r, Index e) {
    t_.row(r) /= t_(r, e);
    Eigen::VectorXd factor = t_.col(e);
    factor[r] = 0.0;
    const Eigen::RowVectorXd pivot_row = t_.row(r);
    t_.noalias() -= factor * pivot_row;
    t_.col(e).setZero();
    t_(r, e) = 1.0;
    basis_[static_cast<std::size_t>(r)] = e;
  }

  // Runs simplex iterations on the current objective row. Columns with
  // blocked[j] never enter.
  Status iterate(const std::vector<bool>& blocked, int max_pivots, int& pivots) {
    int degenerate_streak = 0;
    const Index obj = rows();
    while (pivots < max_pivots) {
      const bool bland = degenerate_streak >= kDegenerateStreakForBland;
      Index enter = -1;
      double best = -kCostTol;
      for (Index j = 0; j < cols(); ++j) {
        if (blocked[static_cast<std::size_t>(j)]) continue;
        const double d = t_(obj, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Status::Optimal;

      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double q = rhs(r) / a;
        if (q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && leave >= 0 &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          ratio = std::min(q, ratio);
          leave = r;
        }
      }
      if (leave < 0) return Status::Unbounded;
      degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
    return Status::IterationLimit;
  }

 private:
  RowMatrix t_;
  std::vector<Index> basis_;
};

}  // namespace

Solution solve(const Problem& problem, int max_pivots) {
  const Index m = problem.a.rows();
  const Index nv = problem.a.cols();
  if (problem.b.size() != m || problem.c.size() != nv ||
      static_cast<Index>(problem.relations.size()) != m) {
    throw DimensionMismatch("lp::solve: inconsistent problem dimensions");
  }

  // Flip rows so that every right-hand side is nonnegative.
  std::vector<Relation> rel = problem.relations;
  std::vector<double> flip(static_cast<std::size_t>(m), 1.0);
  Index n_slack = 0;
  Index n_art = 0;
  for (Index r = 0; r < m; ++r) {
    auto& rr = rel[static_cast<std::size_t>(r)];
    if (problem.b[r] < 0.0) {
      flip[static_cast<std::size_t>(r)] = -1.0;
      if (rr == Relation::LessEqual) {
        rr = Relation::GreaterEqual;
      } else if (rr == Relation::GreaterEqual) {
        rr = Relation::LessEqual;
      }
    }
    if (rr != Relation::Equal) ++n_slack;
    if (rr != Relation::LessEqual) ++n_art;
  }

  const Index art_begin = nv + n_slack;
  const Index ncols = art_begin + n_art;
  Tableau tab(m, ncols);
  auto& t = tab.t();
  auto& basis = tab.basis();

  Index slack = nv;
  Index art = art_begin;
  for (Index r = 0; r < m; ++r) {
    const double f = flip[static_cast<std::size_t>(r)];
    t.row(r).head(nv) = f * problem.a.row(r);
    t(r, ncols) = f * problem.b[r];
    switch (rel[static_cast<std::size_t>(r)]) {
      case Relation::LessEqual:
        t(r, slack) = 1.0;
        basis[static_cast<std::size_t>(r)] = slack++;
        break;
      case Relation::GreaterEqual:
        t(r, slack++) = -1.0;
        t(r, art) = 1.0;
        basis[static_cast<std::size_t>(r)] = art++;
        break;
      case Relation::Equal:
        t(r, art) = 1.0;
        basis[static_cast<std::size_t>(r)] = art++;
        break;
    }
  }

  Solution out;
  std::vector<bool> blocked(static_cast<std::size_t>(ncols), false);

  if (n_art > 0) {
    // Phase 1: minimize the sum of artificials.
    t.row(m).setZero();
    for (Index j = art_begin; j < ncols; ++j) t(m, j) = 1.0;
    for (Index r = 0; r < m; ++r) {
      if (basis[static_cast<std::size_t>(r)] >= art_begin) t.row(m) -= t.row(r);
    }
    const Status s1 = tab.iterate(blocked, max_pivots, out.pivots);
    if (s1 == Status::IterationLimit) {
      out.status = s1;
      return out;
    }
    const double infeasibility = -t(m, ncols);
    if (infeasibility > 1e-8 * (1.0 + problem.b.cwiseAbs().maxCoeff())) {
      out.status = Status::Infeasible;
      return out;
    }
    for (Index r = 0; r < m; ++r) {
      if (basis[static_cast<std::size_t>(r)] < art_begin) continue;
      for (Index j = 0; j < art_begin; ++j) {
        if (std::abs(t(r, j)) > kPivotTol) {
          tab.pivot(r, j);
          break;
        }
      }
    }
    for (Index j = art_begin; j < ncols; ++j) blocked[static_cast<std::size_t>(j)] = true;
  }

  // Phase 2 objective row: reduced costs c_j - c_B' B^{-1} a_j.
  t.row(m).setZero();
  t.row(m).head(nv) = problem.c.transpose();
  for (Index r = 0; r < m; ++r) {
    const Index bj = basis[static_cast<std::size_t>(r)];
    if (bj < nv && problem.c[bj] != 0.0) t.row(m) -= problem.c[bj] * t.row(r);
  }
  out.status = tab.iterate(blocked, max_pivots, out.pivots);

  out.x = Vector::Zero(nv);
  for (Index r = 0; r < m; ++r) {
    const Index bj = basis[static_cast<std::size_t>(r)];
    if (bj < nv) out.x[bj] = std::max(0.0, t(r, ncols));
  }
  out.objective = problem.c.dot(out.x);
  return out;
}

}  // namespace plad::lp
