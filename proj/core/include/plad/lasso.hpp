#pragma once

#include <vector>

#include "plad/core_model.hpp"

namespace plad {

enum class LassoStatus { Optimal, SweepLimit };
const char* to_string(LassoStatus status) noexcept;

struct LassoFit {
  Coefficients coefficients;
  double objective = 0.0;  // (1/2)||y - X beta||_2^2 + lambda ||beta||_1
  double kkt_gap = 0.0;
  int iterations = 0;  // sweeps
  LassoStatus status = LassoStatus::Optimal;
};

/// Cyclic coordinate descent; stops once the largest coefficient change in a
/// sweep is below tol (1 + ||beta||_inf).
LassoFit fit_lasso(const DesignMatrix& x, const Vector& y, double lambda, double tol = 1e-10,
                   int max_sweeps = 10000);

/// Largest violation of the lasso optimality conditions:
///   |X_j'r| <= lambda where beta_j = 0, X_j'r = lambda sign(beta_j) otherwise.
double lasso_kkt_gap(const DesignMatrix& x, const Vector& y, const Vector& beta, double lambda);

/// sigma * lambda_base, or 0.01 * lambda_base in the noiseless case.
double lasso_penalty_known_sigma(double sigma, double lambda_base);

}  // namespace plad
