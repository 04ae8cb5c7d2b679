#include "glmvi/dataset.hpp"

#include <cmath>

#include "glmvi/error.hpp"

namespace glmvi {

VectorXd augment(const VectorXd& x, bool intercept) {
  if (!intercept) return x;
  VectorXd out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

Dataset::Dataset(MatrixXd covariates, VectorXd responses, bool intercept)
    : covariates_(std::move(covariates)), y_(std::move(responses)), intercept_(intercept) {
  if (covariates_.rows() != y_.size()) {
    throw ShapeError("dataset: covariate rows and response length differ");
  }
  if (!covariates_.allFinite() || !y_.allFinite()) {
    throw DomainError("dataset: non-finite covariate or response");
  }
  const auto n = covariates_.rows();
  const auto d = covariates_.cols();
  design_.resize(n, d + (intercept_ ? 1 : 0));
  if (intercept_) {
    design_.col(0).setOnes();
    design_.rightCols(d) = covariates_;
  } else {
    design_ = covariates_;
  }
  max_abs_x_ = (n > 0 && d > 0) ? covariates_.cwiseAbs().maxCoeff() : 0.0;
}

Dataset Dataset::from_observations(const std::vector<Observation>& obs, bool intercept) {
  const auto d = obs.empty() ? 0 : obs.front().x.size();
  MatrixXd X(static_cast<Eigen::Index>(obs.size()), d);
  VectorXd y(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].x.size() != d) throw ShapeError("dataset: observations differ in dimension");
    X.row(static_cast<Eigen::Index>(i)) = obs[i].x.transpose();
    y(static_cast<Eigen::Index>(i)) = obs[i].y;
  }
  return Dataset(std::move(X), std::move(y), intercept);
}

Observation Dataset::observation(std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  return {covariates_.row(r).transpose(), y_(r)};
}

double Dataset::max_abs_design() const noexcept {
  return intercept_ ? std::max(1.0, max_abs_x_) : max_abs_x_;
}

double Dataset::max_abs_covariate_response() const noexcept {
  if (covariates_.size() == 0) return 0.0;
  const double xy = (covariates_.array().colwise() * y_.array()).abs().maxCoeff();
  return std::max(max_abs_x_, xy);
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw ShapeError("dataset: slice out of range");
  const auto f = static_cast<Eigen::Index>(first);
  const auto c = static_cast<Eigen::Index>(count);
  Dataset out(covariates_.middleRows(f, c), y_.segment(f, c), intercept_);
  out.R_ = R_;
  return out;
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim() || a.intercept() != b.intercept()) {
    throw ShapeError("dataset: cannot concatenate datasets of different shape");
  }
  MatrixXd X(a.covariates_.rows() + b.covariates_.rows(), a.dim());
  X << a.covariates_, b.covariates_;
  VectorXd y(a.y_.size() + b.y_.size());
  y << a.y_, b.y_;
  return Dataset(std::move(X), std::move(y), a.intercept());
}

}  // namespace glmvi
