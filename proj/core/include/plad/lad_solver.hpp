#pragma once

#include <span>
#include <string>
#include <vector>

#include "plad/core_model.hpp"

namespace plad {

/// The penalized problem rewritten as plain LAD: the original n rows followed
/// by p pseudo-observations (y = 0, x = lambda * e_j).
///
/// The pseudo-rows are kept implicit; x_aug()/y_aug() materialize them.
struct AugmentedProblem {
  Matrix x;  // n x p
  Vector y;  // n
  double lambda = 0.0;

  Index n() const noexcept { return x.rows(); }
  Index p() const noexcept { return x.cols(); }
  Index rows() const noexcept { return x.rows() + x.cols(); }

  Matrix x_aug() const;
  Vector y_aug() const;
  /// sum_i |y_aug,i - (X_aug gamma)_i|
  double objective(const Vector& gamma) const;
};

enum class SolverStatus { Optimal, IterationLimit, Degenerate };
enum class SolverBackend {
  InteriorPoint,  // Frisch-Newton interior point, then a vertex crossover
  Simplex,        // vertex-descent simplex from the pseudo-observation basis
  Tableau,        // dense two-phase simplex on the split LP; small problems only
};

const char* to_string(SolverStatus status) noexcept;
const char* to_string(SolverBackend backend) noexcept;

struct SolverOptions {
  double tol = 1e-8;
  SolverBackend backend = SolverBackend::InteriorPoint;
  int max_ipm_iterations = 200;
  int max_pivots = 20000;
  /// Relative size of the random right-hand-side perturbation used to break
  /// degeneracy during vertex descent (removed before the final solve).
  double perturbation = 1e-10;
};

struct FitResult {
  Coefficients coefficients;
  Vector residuals;  // y - X beta_hat, length n
  double objective = 0.0;
  double kkt_gap = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::Optimal;
  double lambda = 0.0;
  /// Objective reached by the interior-point phase before crossover (NaN for
  /// other backends).
  double interior_objective = 0.0;
  std::vector<std::string> warnings;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

AugmentedProblem augment(const DesignMatrix& x, const Vector& y, double lambda);

/// Minimizes the augmented LAD objective. The returned kkt_gap is computed by
/// kkt_gap() independently of the backend.
FitResult solve_lad(const AugmentedProblem& problem, const SolverOptions& options = {});

FitResult fit_plad(const DesignMatrix& x, const Vector& y, double lambda,
                   const SolverOptions& options = {});

/// Ordinary LAD on the selected columns; other coefficients are zero.
FitResult refit_on_support(const DesignMatrix& x, const Vector& y, std::span<const Index> support,
                           const SolverOptions& options = {});

/// Independent optimality verifier. Rows with |r_i| > tol get d_i = sign(r_i);
/// the remaining d_i range over [-1, 1]. Returns min ||X_aug' d||_inf over those
/// free choices (a small auxiliary LP).
double kkt_gap(const AugmentedProblem& problem, const Vector& gamma, double tol);

}  // namespace plad
