#include "glmvi/inference.hpp"

#include <cmath>

#include "glmvi/error.hpp"
#include "glmvi/linalg.hpp"
#include "glmvi/operators.hpp"
#include "glmvi/parallel.hpp"
#include "glmvi/solvers.hpp"

namespace glmvi {

double theorem1_bound(double R, double M, double mu, int d, std::size_t N, double eps) {
  if (!(R > 0.0) || !(M > 0.0) || !(mu > 0.0) || d < 1 || N == 0 || !(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("theorem1_bound: need R, M, mu, d, N > 0 and eps in (0, 1)");
  }
  const double p = d + 1.0;
  return R * M / mu * std::sqrt(2.0 * p * std::log(2.0 * p / eps) / static_cast<double>(N));
}

bool is_converged(const VectorXd& residual, const VectorXd& beta) {
  return residual.allFinite() && residual.norm() <= 1e-8 * (1.0 + beta.norm());
}

CovarianceEstimate vi_sandwich(const LinkFunction& link, const Dataset& data,
                               const VectorXd& beta_hat, bool require_zero) {
  if (require_zero && !is_converged(empirical_vi(link, data, beta_hat), beta_hat)) {
    throw NotConvergedError("vi_sandwich: beta_hat is not a zero of V_N");
  }
  CovarianceEstimate est;
  est.jacobian = vi_jacobian(link, data, beta_hat);
  est.score_cov = gamma_matrix(link, data, beta_hat);
  est.sandwich = sandwich(est.jacobian, est.score_cov, &est.ridge_used);
  return est;
}

CovarianceEstimate mle_sandwich(const Family& family, const LinkFunction& link,
                                const Dataset& data, const VectorXd& beta_hat, bool require_zero) {
  if (require_zero &&
      !is_converged(empirical_mle_grad(family, link, data, beta_hat), beta_hat)) {
    throw NotConvergedError("mle_sandwich: beta_hat is not a stationary point of the NLL");
  }
  CovarianceEstimate est;
  est.jacobian = mle_hessian(family, link, data, beta_hat);
  est.score_cov = mle_score_covariance(family, link, data, beta_hat);
  est.sandwich = sandwich(est.jacobian, est.score_cov, &est.ridge_used);
  return est;
}

ModelCovariances model_covariances(const Family& family, const LinkFunction& link,
                                   const Dataset& data, const VectorXd& beta) {
  if (data.empty()) throw EmptyDatasetError("model_covariances: empty dataset");
  const VectorXd z = data.design() * beta;
  const auto n = z.size();
  VectorXd wj(n), wv(n), wf(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = link.eval(z(i));
    const double g1 = link.solver_deriv(z(i));
    const double var = model_variance(family, u);
    if (!(var > 0.0)) throw DomainError("model_covariances: nonpositive model variance");
    wj(i) = g1;
    wv(i) = var;
    wf(i) = g1 * g1 / var;
  }
  const MatrixXd& X = data.design();
  const double N = static_cast<double>(n);
  const MatrixXd J = symmetrize(X.transpose() * wj.asDiagonal() * X / N);
  const MatrixXd G = symmetrize(X.transpose() * wv.asDiagonal() * X / N);
  const MatrixXd F = symmetrize(X.transpose() * wf.asDiagonal() * X / N);
  return {sandwich(J, G), symmetric_inverse(F).inverse};
}

CoverageReport normality_check(const ExperimentConfig& config, std::size_t reps,
                               unsigned threads) {
  if (reps < 100) throw ParameterError("normality_check: need at least 100 replications");
  const VectorXd truth = true_parameter(config);
  const auto p = truth.size();
  const double rootN = std::sqrt(static_cast<double>(config.N));

  struct Rep {
    bool ok = false;
    VectorXd scaled_error;
    VectorXd whitened;
    MatrixXd sigma;
    std::vector<bool> covered;
  };
  std::vector<Rep> results(reps);

  parallel_for(reps, threads, [&](std::size_t r) {
    ExperimentConfig cfg = config;
    cfg.seed = config.seed + r;
    Rep out;
    try {
      const Dataset data = generate(cfg);
      const VectorXd beta_hat = solve_empirical_vi(cfg.link, data, VectorXd::Zero(p));
      const CovarianceEstimate est = vi_sandwich(cfg.link, data, beta_hat);
      out.sigma = est.sandwich;
      out.scaled_error = rootN * (beta_hat - truth);
      out.whitened = inverse_sqrt(est.sandwich) * out.scaled_error;
      out.covered.resize(p);
      for (Eigen::Index j = 0; j < p; ++j) {
        const double half = 1.96 * std::sqrt(est.sandwich(j, j)) / rootN;
        out.covered[j] = std::abs(beta_hat(j) - truth(j)) <= half;
      }
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
    results[r] = std::move(out);
  });

  CoverageReport report;
  report.reps = reps;
  report.coverage_per_coord.assign(p, 0.0);
  report.mean_sandwich = MatrixXd::Zero(p, p);
  MatrixXd errors(p, 0), whitened(p, 0);
  std::vector<VectorXd> e_list, w_list;
  for (const auto& rep : results) {
    if (!rep.ok) {
      ++report.excluded_reps;
      continue;
    }
    for (Eigen::Index j = 0; j < p; ++j) report.coverage_per_coord[j] += rep.covered[j] ? 1.0 : 0.0;
    report.mean_sandwich += rep.sigma;
    e_list.push_back(rep.scaled_error);
    w_list.push_back(rep.whitened);
  }
  const auto kept = e_list.size();
  if (kept < 2) throw NotConvergedError("normality_check: fewer than two usable replications");
  for (auto& c : report.coverage_per_coord) c /= static_cast<double>(kept);
  report.mean_sandwich /= static_cast<double>(kept);

  auto sample_cov = [&](const std::vector<VectorXd>& v) {
    VectorXd mean = VectorXd::Zero(p);
    for (const auto& e : v) mean += e;
    mean /= static_cast<double>(v.size());
    MatrixXd cov = MatrixXd::Zero(p, p);
    for (const auto& e : v) cov += (e - mean) * (e - mean).transpose();
    return MatrixXd(cov / static_cast<double>(v.size() - 1));
  };
  report.mc_covariance = sample_cov(e_list);
  report.standardized_covariance = sample_cov(w_list);
  report.standardized_frobenius =
      (report.standardized_covariance - MatrixXd::Identity(p, p)).norm();
  return report;
}

}  // namespace glmvi
