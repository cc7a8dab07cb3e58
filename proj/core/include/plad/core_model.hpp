#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace plad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Magnitude above which a fitted coefficient counts as selected.
inline constexpr double kSupportEpsilon = 1e-6;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroColumnError : public Error {
 public:
  explicit ZeroColumnError(Index column);
  Index column() const noexcept { return column_; }

 private:
  Index column_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Column-normalized regressor matrix: every column satisfies ||X_j||_2^2 = n.
class DesignMatrix {
 public:
  /// Wraps a matrix that is already normalized; throws DomainError otherwise.
  static DesignMatrix from_normalized(Matrix values, double rel_tol = 1e-10);

  Index n() const noexcept { return values_.rows(); }
  Index p() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  auto col(Index j) const { return values_.col(j); }

  Vector column_l1_norms() const;
  DesignMatrix select_columns(std::span<const Index> columns) const;

 private:
  explicit DesignMatrix(Matrix values) : values_(std::move(values)) {}
  friend DesignMatrix normalize_columns(const Matrix& raw);

  Matrix values_;
};

struct Coefficients {
  Vector beta;
  std::vector<Index> support;

  static Coefficients from_beta(Vector beta, double epsilon = kSupportEpsilon);
};

struct SubdiffStatistic {
  Vector s;
  double sup_norm = 0.0;
  // Observations with z_i == 0; sign(0) = 0 was used for them.
  std::vector<Index> zero_entries;
};

struct RestrictedConeParams {
  double c = 1.1;
  double c_bar = 0.0;
  Index k = 1;

  static RestrictedConeParams from_c(double c, Index k);
};

struct RestrictedSetMembership {
  bool member = false;
  std::vector<Index> witness;  // indices of the k largest |h_j|, ascending
};

inline double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Rescales each column to squared Euclidean norm n. Throws ZeroColumnError.
DesignMatrix normalize_columns(const Matrix& raw);

/// ||y - X gamma||_1 + lambda ||gamma||_1
double plad_objective(const DesignMatrix& x, const Vector& y, const Vector& gamma,
                      double lambda);

/// S = X' sign(z).
SubdiffStatistic subdiff_statistic(const DesignMatrix& x, const Vector& z);

/// Tests ||h_T||_1 >= c_bar ||h_{T^c}||_1 for the best T with |T| <= k.
RestrictedSetMembership in_restricted_set(const Vector& h, Index k, double c_bar);

/// Type-I count: true support entries missing from the estimate.
Index count_missed(std::span<const Index> truth, std::span<const Index> estimate);
/// Type-II count: estimated support entries outside the true support.
Index count_false_selections(std::span<const Index> truth, std::span<const Index> estimate);

}  // namespace plad
