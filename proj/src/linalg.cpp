#include "glmvi/linalg.hpp"

#include <cmath>

#include "glmvi/error.hpp"

namespace glmvi {

namespace {

double condition_of(const VectorXd& eigenvalues) {
  const double hi = eigenvalues.cwiseAbs().maxCoeff();
  const double lo = eigenvalues.cwiseAbs().minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

MatrixXd invert_from(const Eigen::SelfAdjointEigenSolver<MatrixXd>& es) {
  const VectorXd inv = es.eigenvalues().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SymmetricInverse symmetric_inverse(const MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ShapeError("symmetric_inverse: need a nonempty square matrix");
  if (!a.allFinite()) throw SingularityError("symmetric_inverse: non-finite matrix");
  const MatrixXd s = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  SymmetricInverse out;
  out.condition = condition_of(es.eigenvalues());
  if (out.condition <= kMaxCondition) {
    out.inverse = symmetrize(invert_from(es));
    return out;
  }
  const double trace = s.trace();
  out.ridge = 1e-8 * std::abs(trace) / static_cast<double>(s.rows());
  if (!(out.ridge > 0.0)) throw SingularityError("symmetric_inverse: zero matrix");
  const double sign = trace >= 0.0 ? 1.0 : -1.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> ridged(
      s + sign * out.ridge * MatrixXd::Identity(s.rows(), s.cols()));
  out.condition = condition_of(ridged.eigenvalues());
  if (!(out.condition <= kMaxCondition)) {
    throw SingularityError("symmetric_inverse: matrix singular beyond ridge rescue");
  }
  out.inverse = symmetrize(invert_from(ridged));
  return out;
}

double min_singular_value(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  // Fewer rows than columns: the missing singular values are zero.
  if (a.rows() < a.cols()) return 0.0;
  return sv(sv.size() - 1);
}

double min_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

MatrixXd inverse_sqrt(const MatrixXd& spd) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(spd));
  if (!(es.eigenvalues()(0) > 0.0)) throw SingularityError("inverse_sqrt: matrix not positive definite");
  return es.operatorInverseSqrt();
}

MatrixXd sandwich(const MatrixXd& bread, const MatrixXd& filling, double* ridge_used) {
  const SymmetricInverse inv = symmetric_inverse(bread);
  if (ridge_used) *ridge_used = inv.ridge;
  return symmetrize(inv.inverse * filling * inv.inverse.transpose());
}

}  // namespace glmvi
