#include "plad/lasso.hpp"

#include <cassert>
#include <cmath>

namespace plad {
namespace {

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double objective(const Vector& r, const Vector& beta, double lambda) {
  return 0.5 * r.squaredNorm() + lambda * beta.lpNorm<1>();
}

}  // namespace

const char* to_string(LassoStatus status) noexcept {
  return status == LassoStatus::Optimal ? "Optimal" : "SweepLimit";
}

LassoFit fit_lasso(const DesignMatrix& x, const Vector& y, double lambda, double tol,
                   int max_sweeps) {
  if (y.size() != x.n()) throw DimensionMismatch("fit_lasso: y must have length n");
  if (!(lambda >= 0.0)) throw DomainError("fit_lasso: lambda must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("fit_lasso: tol must be positive");

  const Matrix& xv = x.values();
  const Vector col_sq = xv.colwise().squaredNorm();
  Vector beta = Vector::Zero(x.p());
  Vector r = y;  // y - X beta, kept current

  LassoFit out;
  out.status = LassoStatus::SweepLimit;
  [[maybe_unused]] double previous = objective(r, beta, lambda);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (Index j = 0; j < x.p(); ++j) {
      const double old = beta[j];
      // X_j' (r + X_j beta_j) = X_j' r + ||X_j||^2 beta_j
      const double rho = xv.col(j).dot(r) + col_sq[j] * old;
      const double updated = soft(rho, lambda) / col_sq[j];
      if (updated != old) {
        r.noalias() -= (updated - old) * xv.col(j);
        beta[j] = updated;
        biggest = std::max(biggest, std::abs(updated - old));
      }
    }
    out.iterations = sweep + 1;
#ifndef NDEBUG
    const double current = objective(r, beta, lambda);
    assert(current <= previous + 1e-9 * (1.0 + std::abs(previous)));
    previous = current;
#endif
    if (biggest < tol * (1.0 + beta.lpNorm<Eigen::Infinity>())) {
      out.status = LassoStatus::Optimal;
      break;
    }
  }
  r = y - xv * beta;
  out.objective = objective(r, beta, lambda);
  out.kkt_gap = lasso_kkt_gap(x, y, beta, lambda);
  out.coefficients = Coefficients::from_beta(std::move(beta));
  return out;
}

double lasso_kkt_gap(const DesignMatrix& x, const Vector& y, const Vector& beta, double lambda) {
  if (beta.size() != x.p()) throw DimensionMismatch("lasso_kkt_gap: beta must have length p");
  const Vector score = x.values().transpose() * (y - x.values() * beta);
  double gap = 0.0;
  for (Index j = 0; j < score.size(); ++j) {
    const double v = beta[j] == 0.0 ? std::abs(score[j]) - lambda
                                    : std::abs(score[j] - lambda * sign(beta[j]));
    gap = std::max(gap, v);
  }
  return gap;
}

double lasso_penalty_known_sigma(double sigma, double lambda_base) {
  if (!(sigma >= 0.0)) throw DomainError("lasso_penalty_known_sigma: sigma must be nonnegative");
  return sigma == 0.0 ? 0.01 * lambda_base : sigma * lambda_base;
}

}  // namespace plad
