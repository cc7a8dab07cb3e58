#include <algorithm>
#include <cmath>
#include <limits>

#include "solver_internal.hpp"

namespace plad::detail {
namespace {

constexpr double kStepScale = 0.99995;
constexpr double kConvergence = 1e-11;

// Largest step in [0, 1] keeping v + step * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
  double step = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

// Operator view of X_active = [X; lambda I].
struct ActiveDesign {
  const AugmentedProblem& problem;
  Index n;
  Index p;
  bool penalized;

  // X_active v (length m)
  Vector apply(const Vector& v) const {
    Vector out(penalized ? n + p : n);
    out.head(n).noalias() = problem.x * v;
    if (penalized) out.tail(p) = problem.lambda * v;
    return out;
  }
  // X_active' u (length p)
  Vector apply_transpose(const Vector& u) const {
    Vector out = problem.x.transpose() * u.head(n);
    if (penalized) out += problem.lambda * u.tail(p);
    return out;
  }
  // X_active' diag(theta) X_active
  Matrix weighted_gram(const Vector& theta) const {
    const Matrix scaled = problem.x.array().colwise() * theta.head(n).array().sqrt();
    Matrix gram = Matrix::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    if (penalized) {
      gram.diagonal() += problem.lambda * problem.lambda * theta.tail(p);
    }
    return gram;
  }
};

}  // namespace

// Variables follow the bounded-dual form min c'a s.t. A a = b, 0 <= a <= 1
// with A = X_active', c = -target, b = A 1/2 and a = (d + 1)/2. The equality
// multipliers beta give the regression coefficients as gamma = -beta; z and w
// are the negative and positive residual parts.
InteriorPointOutcome frisch_newton(const AugmentedProblem& problem, const Vector& target,
                                   int max_iterations) {
  const ActiveDesign design{problem, problem.n(), problem.p(), problem.lambda > 0.0};
  const Index m = target.size();
  const Index p = problem.p();

  const Vector c = -target;
  const Vector b = design.apply_transpose(Vector::Constant(m, 0.5));

  Vector a = Vector::Constant(m, 0.5);
  Vector s = Vector::Constant(m, 0.5);
  Vector beta = Vector::Zero(p);
  Vector z = target.cwiseAbs().cwiseMax(1.0);
  Vector w = z;

  const double b_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double c_scale = 1.0 + c.lpNorm<Eigen::Infinity>();

  InteriorPointOutcome out;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Vector r_primal = b - design.apply_transpose(a);
    const Vector r_dual = c - design.apply(beta) - z + w;
    const double gap = a.dot(z) + s.dot(w);
    const double mu = gap / (2.0 * static_cast<double>(m));

    out.iterations = iter;
    if (r_primal.lpNorm<Eigen::Infinity>() <= kConvergence * b_scale &&
        r_dual.lpNorm<Eigen::Infinity>() <= kConvergence * c_scale &&
        gap <= kConvergence * (1.0 + std::abs(c.dot(a)))) {
      out.converged = true;
      break;
    }

    const Vector theta = ((z.array() / a.array()) + (w.array() / s.array())).inverse();
    const Eigen::LLT<Matrix> chol(design.weighted_gram(theta));
    if (chol.info() != Eigen::Success) break;

    auto direction = [&](const Vector& comp_z, const Vector& comp_w, Vector& da, Vector& dbeta,
                         Vector& dz, Vector& dw) {
      const Vector rho =
          r_dual - (comp_z.array() / a.array()).matrix() + (comp_w.array() / s.array()).matrix();
      dbeta = chol.solve(r_primal + design.apply_transpose(theta.cwiseProduct(rho)));
      da = theta.cwiseProduct(design.apply(dbeta) - rho);
      dz = ((comp_z - z.cwiseProduct(da)).array() / a.array()).matrix();
      dw = ((comp_w + w.cwiseProduct(da)).array() / s.array()).matrix();
    };

    // Predictor (affine scaling) direction.
    Vector da, dbeta, dz, dw;
    direction(-a.cwiseProduct(z), -s.cwiseProduct(w), da, dbeta, dz, dw);
    const double ap_aff = std::min(max_step(a, da), max_step(s, -da));
    const double ad_aff = std::min(max_step(z, dz), max_step(w, dw));
    const double mu_aff = ((a + ap_aff * da).dot(z + ad_aff * dz) +
                           (s - ap_aff * da).dot(w + ad_aff * dw)) /
                          (2.0 * static_cast<double>(m));
    const double sigma = std::pow(mu_aff / mu, 3.0);
    const double target_mu = sigma * mu;

    // Corrector.
    const Vector comp_z =
        Vector::Constant(m, target_mu) - a.cwiseProduct(z) - da.cwiseProduct(dz);
    const Vector comp_w =
        Vector::Constant(m, target_mu) - s.cwiseProduct(w) + da.cwiseProduct(dw);
    direction(comp_z, comp_w, da, dbeta, dz, dw);

    const double ap = std::min(1.0, kStepScale * std::min(max_step(a, da), max_step(s, -da)));
    const double ad = std::min(1.0, kStepScale * std::min(max_step(z, dz), max_step(w, dw)));
    a += ap * da;
    s -= ap * da;
    beta += ad * dbeta;
    z += ad * dz;
    w += ad * dw;
    out.iterations = iter + 1;
  }
  out.gamma = -beta;
  return out;
}

}  // namespace plad::detail
