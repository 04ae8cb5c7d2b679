#pragma once

#include <Eigen/Dense>

namespace glmvi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Condition number beyond which symmetric_inverse adds a ridge.
inline constexpr double kMaxCondition = 1e12;

struct SymmetricInverse {
  MatrixXd inverse;
  double ridge = 0.0;
  double condition = 1.0;
};

/// Inverse of a symmetric matrix through its eigendecomposition. When the
/// condition number max|l|/min|l| exceeds kMaxCondition a ridge
/// 1e-8 * trace / dim is added; if that does not rescue it, throws
/// SingularityError.
SymmetricInverse symmetric_inverse(const MatrixXd& a);

/// Smallest singular value by dense SVD.
double min_singular_value(const MatrixXd& a);
double min_eigenvalue(const MatrixXd& symmetric);
double max_eigenvalue(const MatrixXd& symmetric);

/// A^{-1/2} for symmetric positive definite A.
MatrixXd inverse_sqrt(const MatrixXd& spd);

/// (A + A') / 2.
inline MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

/// bread^{-1} * filling * bread^{-T}, symmetrized. Reports the ridge used.
MatrixXd sandwich(const MatrixXd& bread, const MatrixXd& filling, double* ridge_used = nullptr);

}  // namespace glmvi
