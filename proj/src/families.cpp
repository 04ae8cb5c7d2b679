#include "glmvi/families.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "glmvi/error.hpp"

namespace glmvi {

namespace {

std::atomic<std::uint64_t> g_clamps{0};

[[noreturn]] void out_of_domain(const Family& f, double u) {
  throw DomainError(f.name() + " loss: mean " + std::to_string(u) + " outside the loss domain");
}

void check_domain(const Family& f, double u) {
  if (!std::isfinite(u)) out_of_domain(f, u);
  switch (f.kind) {
    case FamilyKind::gaussian:
      return;
    case FamilyKind::bernoulli:
      if (!(u > 0.0 && u < 1.0)) out_of_domain(f, u);
      return;
    case FamilyKind::poisson:
    case FamilyKind::exponential:
      if (!(u > 0.0)) out_of_domain(f, u);
      return;
  }
}

// Clamp u sitting exactly on the boundary of the loss domain.
double clamp_mean(const Family& f, double u) {
  if (!std::isfinite(u)) out_of_domain(f, u);
  switch (f.kind) {
    case FamilyKind::gaussian:
      return u;
    case FamilyKind::bernoulli:
      if (u < 0.0 || u > 1.0) out_of_domain(f, u);
      if (u == 0.0) {
        g_clamps.fetch_add(1, std::memory_order_relaxed);
        return kMeanFloor;
      }
      if (u == 1.0) {
        g_clamps.fetch_add(1, std::memory_order_relaxed);
        return std::nextafter(1.0, 0.0);
      }
      return u;
    case FamilyKind::poisson:
    case FamilyKind::exponential:
      if (u < 0.0) out_of_domain(f, u);
      if (u < kMeanFloor) {
        g_clamps.fetch_add(1, std::memory_order_relaxed);
        return kMeanFloor;
      }
      return u;
  }
  return u;
}

}  // namespace

LinkKind Family::canonical_link_kind() const noexcept {
  switch (kind) {
    case FamilyKind::gaussian: return LinkKind::identity;
    case FamilyKind::bernoulli: return LinkKind::logit_sigmoid;
    case FamilyKind::poisson: return LinkKind::exp;
    case FamilyKind::exponential: return LinkKind::reciprocal;
  }
  return LinkKind::identity;
}

double Family::canonical_sign() const noexcept {
  return kind == FamilyKind::exponential ? -1.0 : 1.0;
}

std::string Family::name() const {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::bernoulli: return "bernoulli";
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::exponential: return "exponential";
  }
  return "unknown";
}

Family parse_family(std::string_view spec) {
  if (spec == "gaussian") return Family::gaussian();
  if (spec == "bernoulli") return Family::bernoulli();
  if (spec == "poisson") return Family::poisson();
  if (spec == "exponential") return Family::exponential();
  throw ConfigError("unknown family '" + std::string(spec) + "'");
}

double loss(const Family& f, double u, double y) {
  check_domain(f, u);
  switch (f.kind) {
    case FamilyKind::gaussian:
      return 0.5 * (u - y) * (u - y);
    case FamilyKind::bernoulli:
      return -y * std::log(u) - (1.0 - y) * std::log1p(-u);
    case FamilyKind::poisson:
      return -y * std::log(u) + u;
    case FamilyKind::exponential:
      return std::log(u) + y / u;
  }
  return 0.0;
}

double loss_deriv(const Family& f, double u, double y) {
  check_domain(f, u);
  switch (f.kind) {
    case FamilyKind::gaussian:
      return u - y;
    case FamilyKind::bernoulli:
      return -y / u + (1.0 - y) / (1.0 - u);
    case FamilyKind::poisson:
      return 1.0 - y / u;
    case FamilyKind::exponential:
      return 1.0 / u - y / (u * u);
  }
  return 0.0;
}

double loss_deriv2(const Family& f, double u, double y) {
  check_domain(f, u);
  switch (f.kind) {
    case FamilyKind::gaussian:
      return 1.0;
    case FamilyKind::bernoulli:
      return y / (u * u) + (1.0 - y) / ((1.0 - u) * (1.0 - u));
    case FamilyKind::poisson:
      return y / (u * u);
    case FamilyKind::exponential:
      return -1.0 / (u * u) + 2.0 * y / (u * u * u);
  }
  return 0.0;
}

double model_variance(const Family& f, double u) {
  switch (f.kind) {
    case FamilyKind::gaussian: return 1.0;
    case FamilyKind::bernoulli: return u * (1.0 - u);
    case FamilyKind::poisson: return u;
    case FamilyKind::exponential: return u * u;
  }
  return 1.0;
}

double mle_score_weight(const Family& f, const LinkFunction& link, double z, double y) {
  const double u = clamp_mean(f, link.eval(z));
  return link.solver_deriv(z) * loss_deriv(f, u, y);
}

double mle_hessian_weight(const Family& f, const LinkFunction& link, double z, double y) {
  const double u = clamp_mean(f, link.eval(z));
  const double g1 = link.solver_deriv(z);
  return link.deriv2(z) * loss_deriv(f, u, y) + g1 * g1 * loss_deriv2(f, u, y);
}

std::uint64_t mean_clamp_count() noexcept { return g_clamps.load(std::memory_order_relaxed); }

namespace {
VectorXd checked_augment(const Observation& obs, const VectorXd& beta, bool intercept) {
  const auto p = obs.x.size() + (intercept ? 1 : 0);
  if (beta.size() != p) {
    throw ShapeError("sample operator: beta has length " + std::to_string(beta.size()) +
                     ", expected " + std::to_string(p));
  }
  return augment(obs.x, intercept);
}
}  // namespace

VectorXd vi_sample_op(const LinkFunction& link, const Observation& obs, const VectorXd& beta,
                      bool intercept) {
  VectorXd xt = checked_augment(obs, beta, intercept);
  const double z = xt.dot(beta);
  return (link.eval(z) - obs.y) * xt;
}

VectorXd mle_sample_grad(const Family& family, const LinkFunction& link, const Observation& obs,
                         const VectorXd& beta, bool intercept) {
  VectorXd xt = checked_augment(obs, beta, intercept);
  const double z = xt.dot(beta);
  return mle_score_weight(family, link, z, obs.y) * xt;
}

}  // namespace glmvi
