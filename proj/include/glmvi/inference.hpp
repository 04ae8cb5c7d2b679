#pragma once

#include <cstddef>
#include <vector>

#include "glmvi/dataset.hpp"
#include "glmvi/families.hpp"
#include "glmvi/links.hpp"
#include "glmvi/synth.hpp"

namespace glmvi {

/// (R M / mu) sqrt(2 (d + 1) ln(2 (d + 1) / eps) / N): with probability at
/// least 1 - eps, |beta_hat_N - beta*| is below this.
double theorem1_bound(double R, double M, double mu, int d, std::size_t N, double eps);

struct CovarianceEstimate {
  MatrixXd jacobian;
  MatrixXd score_cov;
  /// jacobian^{-1} score_cov jacobian^{-T}: asymptotic covariance of
  /// sqrt(N) (beta_hat - beta*).
  MatrixXd sandwich;
  double ridge_used = 0.0;
};

/// Residual level accepted as an exact zero: |F(beta)| <= 1e-8 (1 + |beta|).
bool is_converged(const VectorXd& residual, const VectorXd& beta);

/// Sandwich from vi_jacobian and gamma_matrix at beta_hat. With
/// require_zero, throws NotConvergedError unless beta_hat zeroes V_N.
CovarianceEstimate vi_sandwich(const LinkFunction& link, const Dataset& data,
                               const VectorXd& beta_hat, bool require_zero = true);

/// Sandwich from the mean observed NLL Hessian and the mean score outer
/// product. With require_zero, beta_hat must zero the mean NLL gradient.
CovarianceEstimate mle_sandwich(const Family& family, const LinkFunction& link,
                                const Dataset& data, const VectorXd& beta_hat,
                                bool require_zero = true);

/// Population-form covariances at beta using the covariate sample only, with
/// the model-implied Var(y | x) in place of squared residuals:
///   vi  = J^{-1} E[Var x~x~'] J^{-1},  J = E[g' x~x~']
///   mle = (E[(g')^2 / Var x~x~'])^{-1}
struct ModelCovariances {
  MatrixXd vi;
  MatrixXd mle;
};
ModelCovariances model_covariances(const Family& family, const LinkFunction& link,
                                   const Dataset& data, const VectorXd& beta);

struct CoverageReport {
  std::vector<double> coverage_per_coord;
  /// Mean over replications of the estimated sandwich.
  MatrixXd mean_sandwich;
  /// Sample covariance of sqrt(N) (beta_hat - beta*).
  MatrixXd mc_covariance;
  /// Sample covariance of sandwich-whitened errors, ideally the identity.
  MatrixXd standardized_covariance;
  double standardized_frobenius = 0.0;
  std::size_t reps = 0;
  std::size_t excluded_reps = 0;
};

/// Wald-interval coverage of beta* over `reps` replications of `config`;
/// replication r uses seed config.seed + r.
CoverageReport normality_check(const ExperimentConfig& config, std::size_t reps,
                               unsigned threads = 1);

}  // namespace glmvi
