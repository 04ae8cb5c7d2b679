#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace glmvi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Observation {
  VectorXd x;
  double y = 0.0;
};

/// x~ = [1; x] when intercept is set, x otherwise.
VectorXd augment(const VectorXd& x, bool intercept);

/// N observations sharing covariate dimension d. Stores the augmented design
/// X~ (N x p, p = d + intercept) row-major by observation.
class Dataset {
 public:
  Dataset() = default;
  /// Throws ShapeError on mismatched sizes, DomainError on non-finite entries.
  Dataset(MatrixXd covariates, VectorXd responses, bool intercept);
  static Dataset from_observations(const std::vector<Observation>& obs, bool intercept);

  std::size_t size() const noexcept { return static_cast<std::size_t>(y_.size()); }
  bool empty() const noexcept { return y_.size() == 0; }
  /// Covariate dimension d (without intercept).
  int dim() const noexcept { return static_cast<int>(covariates_.cols()); }
  /// Parameter dimension p = d + intercept.
  int param_dim() const noexcept { return static_cast<int>(design_.cols()); }
  bool intercept() const noexcept { return intercept_; }

  const MatrixXd& covariates() const noexcept { return covariates_; }
  const MatrixXd& design() const noexcept { return design_; }
  const VectorXd& responses() const noexcept { return y_; }

  Observation observation(std::size_t i) const;

  /// M: max |x_ij| over covariates (0 for d = 0).
  double max_abs_covariate() const noexcept { return max_abs_x_; }
  /// max |x~_ij| over the augmented design (includes the intercept 1).
  double max_abs_design() const noexcept;
  /// max(|x_ij|, |x_ij * y_i|), the bound used by the finite-sample theory.
  double max_abs_covariate_response() const noexcept;

  std::optional<double> residual_bound() const noexcept { return R_; }
  void set_residual_bound(double R) { R_ = R; }

  /// Rows [first, first + count) as a new dataset.
  Dataset slice(std::size_t first, std::size_t count) const;
  static Dataset concat(const Dataset& a, const Dataset& b);

 private:
  MatrixXd covariates_;
  MatrixXd design_;
  VectorXd y_;
  bool intercept_ = false;
  double max_abs_x_ = 0.0;
  std::optional<double> R_;
};

}  // namespace glmvi
