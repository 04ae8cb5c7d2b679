#include "glmvi/operators.hpp"

#include <atomic>
#include <cmath>
#include <random>

#include "glmvi/error.hpp"
#include "glmvi/linalg.hpp"
#include "glmvi/rng.hpp"
#include "glmvi/solvers.hpp"

namespace glmvi {

namespace {

std::atomic<std::uint64_t> g_kinks{0};

void check(const Dataset& data, const VectorXd& beta) {
  if (data.empty()) throw EmptyDatasetError("empirical operator: empty dataset");
  if (beta.size() != data.param_dim()) {
    throw ShapeError("empirical operator: beta has length " + std::to_string(beta.size()) +
                     ", expected " + std::to_string(data.param_dim()));
  }
}

// (1/N) X~' diag(w) X~, built as a sum of symmetric rank-1 terms.
MatrixXd weighted_moment(const MatrixXd& design, const VectorXd& w) {
  MatrixXd m = design.transpose() * w.asDiagonal() * design;
  m /= static_cast<double>(design.rows());
  return symmetrize(m);
}

template <typename F>
VectorXd map_z(const VectorXd& z, F&& f) {
  VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = f(i, z(i));
  return out;
}

}  // namespace

VectorXd empirical_vi(const LinkFunction& link, const Dataset& data, const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  const VectorXd r = map_z(z, [&](Eigen::Index i, double zi) { return link.eval(zi) - y(i); });
  return data.design().transpose() * r / static_cast<double>(data.size());
}

VectorXd empirical_mle_grad(const Family& family, const LinkFunction& link, const Dataset& data,
                            const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  const VectorXd w =
      map_z(z, [&](Eigen::Index i, double zi) { return mle_score_weight(family, link, zi, y(i)); });
  return data.design().transpose() * w / static_cast<double>(data.size());
}

double empirical_nll(const Family& family, const LinkFunction& link, const Dataset& data,
                     const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += loss(family, link.eval(z(i)), y(i));
  return total / static_cast<double>(data.size());
}

MatrixXd vi_jacobian(const LinkFunction& link, const Dataset& data, const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const VectorXd w = map_z(z, [&](Eigen::Index, double zi) {
    if (link.kink_at(zi)) g_kinks.fetch_add(1, std::memory_order_relaxed);
    return link.solver_deriv(zi);
  });
  return weighted_moment(data.design(), w);
}

MatrixXd gamma_matrix(const LinkFunction& link, const Dataset& data, const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  const VectorXd w = map_z(z, [&](Eigen::Index i, double zi) {
    const double r = y(i) - link.eval(zi);
    return r * r;
  });
  return weighted_moment(data.design(), w);
}

MatrixXd mle_hessian(const Family& family, const LinkFunction& link, const Dataset& data,
                     const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  const VectorXd w = map_z(
      z, [&](Eigen::Index i, double zi) { return mle_hessian_weight(family, link, zi, y(i)); });
  return weighted_moment(data.design(), w);
}

MatrixXd mle_score_covariance(const Family& family, const LinkFunction& link, const Dataset& data,
                              const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  const VectorXd w = map_z(z, [&](Eigen::Index i, double zi) {
    const double s = mle_score_weight(family, link, zi, y(i));
    return s * s;
  });
  return weighted_moment(data.design(), w);
}

std::uint64_t jacobian_kink_count() noexcept { return g_kinks.load(std::memory_order_relaxed); }

double residual_bound(const LinkFunction& link, const Dataset& data, const VectorXd& beta) {
  check(data, beta);
  const VectorXd z = data.design() * beta;
  const auto& y = data.responses();
  double r = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) r = std::max(r, std::abs(link.eval(z(i)) - y(i)));
  return r;
}

MintyReport minty_lemma1(const LinkFunction& link, const Dataset& data, const MintyProbe& probe,
                         const std::optional<VectorXd>& beta_hat) {
  if (data.empty()) throw EmptyDatasetError("minty_lemma1: empty dataset");
  MintyReport report;
  report.sigma_min = min_singular_value(data.design());
  if (const auto mu_g = link.monotone_modulus()) {
    report.modulus_lemma1 =
        *mu_g * report.sigma_min * report.sigma_min / static_cast<double>(data.size());
  }
  report.beta_hat = beta_hat ? *beta_hat
                             : solve_empirical_vi(link, data, VectorXd::Zero(data.param_dim()));

  const int p = data.param_dim();
  Philox4x32 gen(probe.seed);
  std::normal_distribution<double> normal;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < probe.directions; ++k) {
    VectorXd u(p);
    for (int j = 0; j < p; ++j) u(j) = normal(gen);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    u /= norm;
    for (double r : probe.radii) {
      const VectorXd step = r * u;
      const VectorXd v = empirical_vi(link, data, report.beta_hat + step);
      best = std::min(best, v.dot(step) / (r * r));
    }
  }
  report.grid_min_ratio = best;
  report.satisfied = best > 0.0;
  return report;
}

std::optional<double> minty_from_weak_monotone(double rho, double lipschitz, double mu_eb) {
  if (!(rho >= 0.0) || !(lipschitz > rho) || !(mu_eb > 0.0) || !std::isfinite(lipschitz)) {
    throw ParameterError("minty_from_weak_monotone: need L > rho >= 0 and mu_EB > 0");
  }
  const double sq = mu_eb * mu_eb;
  if (!(rho * lipschitz < sq)) return std::nullopt;
  return (sq - rho * lipschitz) / (lipschitz - rho);
}

}  // namespace glmvi
