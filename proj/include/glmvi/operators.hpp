#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "glmvi/dataset.hpp"
#include "glmvi/families.hpp"
#include "glmvi/links.hpp"

namespace glmvi {

/// V_N(beta) = (1/N) sum_i (g^{-1}(x~_i' beta) - y_i) x~_i.
VectorXd empirical_vi(const LinkFunction& link, const Dataset& data, const VectorXd& beta);

/// Mean (not sum) of the per-sample NLL gradients; rescaling the sum by 1/N
/// only rescales step sizes.
VectorXd empirical_mle_grad(const Family& family, const LinkFunction& link, const Dataset& data,
                            const VectorXd& beta);

/// Mean NLL (1/N) sum_i l(g^{-1}(z_i), y_i).
double empirical_nll(const Family& family, const LinkFunction& link, const Dataset& data,
                     const VectorXd& beta);

/// (1/N) sum_i (g^{-1})'(z_i) x~_i x~_i'. Samples on a kink use the right
/// derivative and bump jacobian_kink_count().
MatrixXd vi_jacobian(const LinkFunction& link, const Dataset& data, const VectorXd& beta);

/// (1/N) sum_i (y_i - g^{-1}(z_i))^2 x~_i x~_i'.
MatrixXd gamma_matrix(const LinkFunction& link, const Dataset& data, const VectorXd& beta);

/// Mean of per-sample NLL Hessians, (1/N) sum_i [g'' l' + (g')^2 l''] x~_i x~_i'.
MatrixXd mle_hessian(const Family& family, const LinkFunction& link, const Dataset& data,
                     const VectorXd& beta);

/// Mean outer product of per-sample NLL gradients.
MatrixXd mle_score_covariance(const Family& family, const LinkFunction& link, const Dataset& data,
                              const VectorXd& beta);

std::uint64_t jacobian_kink_count() noexcept;

/// R estimate: max_i |g^{-1}(z_i) - y_i| at beta.
double residual_bound(const LinkFunction& link, const Dataset& data, const VectorXd& beta);

struct MintyProbe {
  std::size_t directions = 256;
  std::vector<double> radii{0.1, 1.0, 10.0};
  std::uint64_t seed = 0x5eed;
};

struct MintyReport {
  double sigma_min = 0.0;
  /// mu_g * sigma_min^2 / N; absent when the link has no known modulus.
  std::optional<double> modulus_lemma1;
  /// min over probes of <V_N(beta), beta - beta_hat> / |beta - beta_hat|^2.
  double grid_min_ratio = 0.0;
  bool satisfied = false;
  VectorXd beta_hat;
};

/// Minty diagnostics around the empirical VI solution. Solves for beta_hat
/// first unless one is supplied.
MintyReport minty_lemma1(const LinkFunction& link, const Dataset& data, const MintyProbe& probe = {},
                         const std::optional<VectorXd>& beta_hat = std::nullopt);

/// Strong Minty modulus (mu_EB^2 - rho L) / (L - rho) implied by rho-weak
/// monotonicity, L-Lipschitz continuity and an error bound mu_EB; none when
/// rho L >= mu_EB^2. Requires L > rho >= 0 and mu_EB > 0.
std::optional<double> minty_from_weak_monotone(double rho, double lipschitz, double mu_eb);

}  // namespace glmvi
