#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "glmvi/dataset.hpp"
#include "glmvi/links.hpp"

namespace glmvi {

enum class FamilyKind { gaussian, bernoulli, poisson, exponential };

/// Exponential-family loss l(u, y) with u the conditional mean.
struct Family {
  FamilyKind kind = FamilyKind::gaussian;

  static Family gaussian() { return {FamilyKind::gaussian}; }
  static Family bernoulli() { return {FamilyKind::bernoulli}; }
  static Family poisson() { return {FamilyKind::poisson}; }
  static Family exponential() { return {FamilyKind::exponential}; }

  /// Link kind for which the NLL gradient equals the VI operator (up to sign).
  LinkKind canonical_link_kind() const noexcept;
  /// +1, or -1 for exponential + reciprocal where grad L = -V.
  double canonical_sign() const noexcept;
  bool is_canonical(const LinkFunction& link) const noexcept {
    return link.kind() == canonical_link_kind();
  }

  std::string name() const;
};

/// Parses `gaussian | bernoulli | poisson | exponential`. Throws ConfigError.
Family parse_family(std::string_view spec);

/// Lower clamp applied to u at the loss-domain boundary by the MLE gradient.
inline constexpr double kMeanFloor = 1e-300;

double loss(const Family& family, double u, double y);
/// dl/du.
double loss_deriv(const Family& family, double u, double y);
/// d^2 l / du^2.
double loss_deriv2(const Family& family, double u, double y);
/// Model-implied Var(y | x) at mean u (unit dispersion for gaussian).
double model_variance(const Family& family, double u);

/// (g^{-1}(z) - y) x~ with z = x~' beta.
VectorXd vi_sample_op(const LinkFunction& link, const Observation& obs, const VectorXd& beta,
                      bool intercept);

/// (g^{-1})'(z) * dl/du(g^{-1}(z), y) * x~. Kinks use the right derivative.
VectorXd mle_sample_grad(const Family& family, const LinkFunction& link, const Observation& obs,
                         const VectorXd& beta, bool intercept);

/// Scalar factors shared by the per-sample and aggregated MLE routines.
/// u at the closed domain boundary is clamped (and counted); strictly outside
/// the domain throws DomainError.
double mle_score_weight(const Family& family, const LinkFunction& link, double z, double y);
/// d^2/dz^2 of l(g^{-1}(z), y): g'' l' + (g')^2 l''.
double mle_hessian_weight(const Family& family, const LinkFunction& link, double z, double y);

/// Number of boundary clamps performed by the MLE routines since start-up.
std::uint64_t mean_clamp_count() noexcept;

}  // namespace glmvi
