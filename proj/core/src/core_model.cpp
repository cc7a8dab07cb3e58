#include "plad/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace plad {

ZeroColumnError::ZeroColumnError(Index column)
    : Error("column " + std::to_string(column) + " has zero Euclidean norm"), column_(column) {}

DesignMatrix DesignMatrix::from_normalized(Matrix values, double rel_tol) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw DomainError("design matrix must have n >= 1 and p >= 1");
  }
  if (!values.allFinite()) throw DomainError("design matrix has non-finite entries");
  const double n = static_cast<double>(values.rows());
  for (Index j = 0; j < values.cols(); ++j) {
    const double sq = values.col(j).squaredNorm();
    if (std::abs(sq - n) > rel_tol * n) {
      throw DomainError("column " + std::to_string(j) + " is not normalized (||X_j||^2 = " +
                        std::to_string(sq) + ")");
    }
  }
  return DesignMatrix(std::move(values));
}

Vector DesignMatrix::column_l1_norms() const { return values_.cwiseAbs().colwise().sum(); }

DesignMatrix DesignMatrix::select_columns(std::span<const Index> columns) const {
  Matrix sub(n(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] < 0 || columns[c] >= p()) throw DimensionMismatch("column index out of range");
    sub.col(static_cast<Index>(c)) = values_.col(columns[c]);
  }
  return DesignMatrix(std::move(sub));
}

Coefficients Coefficients::from_beta(Vector beta, double epsilon) {
  Coefficients out;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > epsilon) out.support.push_back(j);
  }
  out.beta = std::move(beta);
  return out;
}

RestrictedConeParams RestrictedConeParams::from_c(double c, Index k) {
  if (!(c > 1.0)) throw DomainError("penalty multiplier c must exceed 1");
  if (k < 1) throw DomainError("sparsity k must be positive");
  return {c, (c - 1.0) / (c + 1.0), k};
}

DesignMatrix normalize_columns(const Matrix& raw) {
  if (raw.rows() < 1 || raw.cols() < 1) {
    throw DomainError("design matrix must have n >= 1 and p >= 1");
  }
  if (!raw.allFinite()) throw DomainError("design matrix has non-finite entries");
  const double root_n = std::sqrt(static_cast<double>(raw.rows()));
  Matrix out(raw.rows(), raw.cols());
  for (Index j = 0; j < raw.cols(); ++j) {
    const double norm = raw.col(j).norm();
    if (norm == 0.0) throw ZeroColumnError(j);
    out.col(j) = raw.col(j) * (root_n / norm);
  }
  return DesignMatrix(std::move(out));
}

double plad_objective(const DesignMatrix& x, const Vector& y, const Vector& gamma, double lambda) {
  if (y.size() != x.n() || gamma.size() != x.p()) {
    throw DimensionMismatch("plad_objective: dimensions of X, y and gamma disagree");
  }
  if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
  return (y - x.values() * gamma).lpNorm<1>() + lambda * gamma.lpNorm<1>();
}

SubdiffStatistic subdiff_statistic(const DesignMatrix& x, const Vector& z) {
  if (z.size() != x.n()) throw DimensionMismatch("subdiff_statistic: z must have length n");
  SubdiffStatistic out;
  Vector signs(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    signs[i] = sign(z[i]);
    if (z[i] == 0.0) out.zero_entries.push_back(i);
  }
  out.s = x.values().transpose() * signs;
  out.sup_norm = out.s.size() > 0 ? out.s.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

RestrictedSetMembership in_restricted_set(const Vector& h, Index k, double c_bar) {
  const Index p = h.size();
  if (k < 1 || k > p) throw DomainError("in_restricted_set: need 1 <= k <= p");
  if (!(c_bar > 0.0 && c_bar <= 1.0)) throw DomainError("in_restricted_set: need 0 < c_bar <= 1");

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  // Largest magnitudes first; ties go to the lower index.
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(h[a]) > std::abs(h[b]); });

  RestrictedSetMembership out;
  out.witness.assign(order.begin(), order.begin() + k);
  std::sort(out.witness.begin(), out.witness.end());

  double inside = 0.0;
  double outside = 0.0;
  for (Index r = 0; r < p; ++r) {
    (r < k ? inside : outside) += std::abs(h[order[static_cast<std::size_t>(r)]]);
  }
  out.member = inside >= c_bar * outside;
  return out;
}

Index count_missed(std::span<const Index> truth, std::span<const Index> estimate) {
  Index count = 0;
  for (Index j : truth) {
    if (std::find(estimate.begin(), estimate.end(), j) == estimate.end()) ++count;
  }
  return count;
}

Index count_false_selections(std::span<const Index> truth, std::span<const Index> estimate) {
  Index count = 0;
  for (Index j : estimate) {
    if (std::find(truth.begin(), truth.end(), j) == truth.end()) ++count;
  }
  return count;
}

}  // namespace plad
