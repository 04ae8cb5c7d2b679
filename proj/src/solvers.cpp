#include "glmvi/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "glmvi/linalg.hpp"
#include "glmvi/operators.hpp"

namespace glmvi {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string("step schedule: ") + what + " must be positive and finite");
  }
}

bool diverged(const VectorXd& beta) {
  return !beta.allFinite() || beta.norm() > kDivergenceNorm;
}

void record(SolverTrace& trace, const VectorXd& beta, std::size_t t, double op_norm,
            const std::optional<VectorXd>& target) {
  trace.iterates.push_back(beta);
  trace.steps.push_back(t);
  trace.operator_norms.push_back(op_norm);
  if (target) trace.errors_to_target->push_back((beta - *target).squaredNorm());
}

}  // namespace

StepSchedule StepSchedule::constant(double eta) {
  require_positive(eta, "eta");
  return {Kind::constant, eta, 0.0, 0.0};
}

StepSchedule StepSchedule::theoretical_fp(double mu, double lipschitz, int d, double M) {
  require_positive(mu, "mu");
  require_positive(lipschitz, "L");
  require_positive(M, "M");
  if (d < 0) throw ParameterError("step schedule: d must be nonnegative");
  const double q = lipschitz * (1.0 + d * M * M);
  return {Kind::theoretical_fp, mu / (q * q), mu * mu / (q * q), 0.0};
}

StepSchedule StepSchedule::robbins_monro(double mu) {
  require_positive(mu, "mu");
  return {Kind::robbins_monro, mu, 0.0, 0.0};
}

StepSchedule StepSchedule::experiment_decay(double eta0, double scale, double rate) {
  require_positive(eta0, "eta0");
  require_positive(scale, "scale");
  require_positive(rate, "decay rate");
  return {Kind::experiment_decay, eta0, scale, rate};
}

StepSchedule StepSchedule::experiment_decay_for(std::size_t N, int d, double eta0, double rate) {
  if (N == 0 || d <= 0) throw ParameterError("step schedule: need N >= 1 and d >= 1");
  return experiment_decay(eta0, std::sqrt(static_cast<double>(N) / d), rate);
}

double StepSchedule::step(std::size_t t) const noexcept {
  switch (kind_) {
    case Kind::constant:
    case Kind::theoretical_fp:
      return a_;
    case Kind::robbins_monro:
      return 1.0 / (a_ * static_cast<double>(t + 1));
    case Kind::experiment_decay:
      return a_ * b_ * std::pow(c_, static_cast<double>(t));
  }
  return 0.0;
}

double StepSchedule::contraction_factor() const {
  if (kind_ != Kind::theoretical_fp) {
    throw ParameterError("contraction factor is only defined for the theoretical step");
  }
  return 1.0 - b_;
}

SolverTrace fixed_point_solve(const VectorOperator& op, const VectorXd& beta0,
                              const StepSchedule& schedule, std::size_t T,
                              const SolveOptions& options) {
  if (T < 1) throw ParameterError("fixed_point_solve: T must be at least 1");
  SolverTrace trace;
  if (options.target) trace.errors_to_target.emplace();
  VectorXd beta = beta0;
  VectorXd v = op(beta);
  record(trace, beta, 0, v.norm(), options.target);
  for (std::size_t t = 0; t < T; ++t) {
    if (options.stop_tol > 0.0 && trace.operator_norms.back() <= options.stop_tol) break;
    VectorXd next = beta - schedule.step(t) * v;
    if (diverged(next)) {
      trace.wall_iterations = t;
      throw DivergenceError("solver diverged at iteration " + std::to_string(t + 1),
                            std::move(trace), t + 1);
    }
    beta = std::move(next);
    v = op(beta);
    record(trace, beta, t + 1, v.norm(), options.target);
    trace.wall_iterations = t + 1;
  }
  return trace;
}

SolverTrace vi_fixed_point_solve(const LinkFunction& link, const Dataset& data,
                                 const VectorXd& beta0, const StepSchedule& schedule,
                                 std::size_t T, const SolveOptions& options) {
  return fixed_point_solve([&](const VectorXd& b) { return empirical_vi(link, data, b); }, beta0,
                           schedule, T, options);
}

SolverTrace mle_gd_solve(const Family& family, const LinkFunction& link, const Dataset& data,
                         const VectorXd& beta0, const StepSchedule& schedule, std::size_t T,
                         const SolveOptions& options) {
  return fixed_point_solve(
      [&](const VectorXd& b) { return empirical_mle_grad(family, link, data, b); }, beta0,
      schedule, T, options);
}

SolverTrace stochastic_approx(const LinkFunction& link, const ObservationStream& stream,
                              const VectorXd& beta0, double mu, std::size_t T,
                              const StreamOptions& options) {
  if (T < 1) throw ParameterError("stochastic_approx: T must be at least 1");
  const StepSchedule schedule = StepSchedule::robbins_monro(mu);
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  SolverTrace trace;
  trace.stride = stride;
  if (options.target) trace.errors_to_target.emplace();
  VectorXd beta = beta0;
  std::size_t t = 0;
  for (; t < T; ++t) {
    auto obs = stream();
    if (!obs) {
      trace.truncated = true;
      break;
    }
    const VectorXd v = vi_sample_op(link, *obs, beta, options.intercept);
    if (t % stride == 0) record(trace, beta, t, v.norm(), options.target);
    VectorXd next = beta - schedule.step(t) * v;
    if (diverged(next)) {
      trace.wall_iterations = t;
      throw DivergenceError("stochastic approximation diverged at iteration " +
                                std::to_string(t + 1),
                            std::move(trace), t + 1);
    }
    beta = std::move(next);
  }
  trace.wall_iterations = t;
  if (trace.steps.empty() || trace.steps.back() != t) {
    record(trace, beta, t, std::numeric_limits<double>::quiet_NaN(), options.target);
  }
  return trace;
}

VectorXd solve_empirical_vi(const LinkFunction& link, const Dataset& data, const VectorXd& beta0,
                            double tol, std::size_t max_iter) {
  if (data.empty()) throw EmptyDatasetError("solve_empirical_vi: empty dataset");
  const double n = static_cast<double>(data.size());
  const bool global_step = std::isfinite(link.lipschitz());
  double eta;
  if (global_step) {
    const MatrixXd second_moment = data.design().transpose() * data.design() / n;
    eta = 1.0 / (link.lipschitz() * max_eigenvalue(second_moment));
  } else {
    eta = 1.0 / std::max(max_eigenvalue(vi_jacobian(link, data, beta0)), 1e-12);
  }
  if (!std::isfinite(eta) || !(eta > 0.0)) {
    throw NotConvergedError("solve_empirical_vi: degenerate design");
  }
  double cap = eta;
  VectorXd beta = beta0;
  VectorXd v = empirical_vi(link, data, beta);
  double r = v.norm();
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (r <= tol * (1.0 + beta.norm())) return beta;
    if (!global_step && it % 50 == 0) {
      const double local = 1.0 / std::max(max_eigenvalue(vi_jacobian(link, data, beta)), 1e-12);
      eta = std::min(cap, local);
    }
    VectorXd next = beta - eta * v;
    VectorXd v_next = next.allFinite() ? empirical_vi(link, data, next) : next;
    const double r_next = v_next.norm();
    if (!std::isfinite(r_next) || r_next > 10.0 * r + 1e-300) {
      eta *= 0.5;
      cap = eta;
      continue;
    }
    beta = std::move(next);
    v = std::move(v_next);
    r = r_next;
  }
  throw NotConvergedError("solve_empirical_vi: no zero of V_N within " + std::to_string(max_iter) +
                          " iterations (residual " + std::to_string(r) + ")");
}

}  // namespace glmvi
