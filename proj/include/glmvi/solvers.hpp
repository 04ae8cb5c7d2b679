#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "glmvi/dataset.hpp"
#include "glmvi/error.hpp"
#include "glmvi/families.hpp"
#include "glmvi/links.hpp"

namespace glmvi {

/// Base step of the benchmark schedule, scaled by sqrt(N/d).
inline constexpr double kExperimentEta0 = 0.01;
/// Per-iteration decay of the benchmark schedule.
inline constexpr double kExperimentDecayRate = 0.975;
/// Iterates with a larger Euclidean norm abort the solve.
inline constexpr double kDivergenceNorm = 1e8;

class StepSchedule {
 public:
  enum class Kind { constant, theoretical_fp, robbins_monro, experiment_decay };

  static StepSchedule constant(double eta);
  /// eta = mu / (L^2 (1 + d M^2)^2).
  static StepSchedule theoretical_fp(double mu, double lipschitz, int d, double M);
  /// eta^t = 1 / (mu (t + 1)).
  static StepSchedule robbins_monro(double mu);
  /// eta^k = eta0 * scale * rate^k.
  static StepSchedule experiment_decay(double eta0, double scale, double rate);
  /// experiment_decay with scale sqrt(N / d).
  static StepSchedule experiment_decay_for(std::size_t N, int d, double eta0 = kExperimentEta0,
                                           double rate = kExperimentDecayRate);

  Kind kind() const noexcept { return kind_; }
  double step(std::size_t t) const noexcept;
  /// Squared-distance contraction 1 - mu^2 / (L^2 (1 + d M^2)^2) guaranteed by
  /// the theoretical fixed-point step; only defined for theoretical_fp.
  double contraction_factor() const;

 private:
  StepSchedule(Kind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}
  Kind kind_;
  double a_, b_, c_;
};

struct SolverTrace {
  /// Recorded iterates; steps[i] is the iteration index of iterates[i].
  std::vector<VectorXd> iterates;
  std::vector<std::size_t> steps;
  /// Operator norm at each recorded iterate. For stochastic approximation
  /// this is the sample operator used for the step (NaN for the last iterate).
  std::vector<double> operator_norms;
  /// |beta^t - target|^2 when a target was supplied.
  std::optional<std::vector<double>> errors_to_target;
  std::size_t wall_iterations = 0;
  std::size_t stride = 1;
  /// Set when an observation stream ran dry before T steps.
  bool truncated = false;

  const VectorXd& final_iterate() const { return iterates.back(); }
};

/// Solver hit a non-finite iterate or one with norm above kDivergenceNorm.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, SolverTrace trace, std::size_t iteration)
      : Error(what), trace_(std::move(trace)), iteration_(iteration) {}
  /// Trace up to and including the last finite iterate.
  const SolverTrace& trace() const noexcept { return trace_; }
  /// Index of the iterate that failed the guard.
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  SolverTrace trace_;
  std::size_t iteration_;
};

using VectorOperator = std::function<VectorXd(const VectorXd&)>;

struct SolveOptions {
  /// Stop once |op(beta^t)| <= stop_tol; 0 runs exactly T iterations.
  double stop_tol = 0.0;
  std::optional<VectorXd> target;
};

/// beta^{t+1} = beta^t - eta^t op(beta^t) for t < T.
SolverTrace fixed_point_solve(const VectorOperator& op, const VectorXd& beta0,
                              const StepSchedule& schedule, std::size_t T,
                              const SolveOptions& options = {});

/// Fixed-point iteration on the empirical VI operator.
SolverTrace vi_fixed_point_solve(const LinkFunction& link, const Dataset& data,
                                 const VectorXd& beta0, const StepSchedule& schedule,
                                 std::size_t T, const SolveOptions& options = {});

/// Gradient descent on the mean empirical NLL.
SolverTrace mle_gd_solve(const Family& family, const LinkFunction& link, const Dataset& data,
                         const VectorXd& beta0, const StepSchedule& schedule, std::size_t T,
                         const SolveOptions& options = {});

/// Yields the next streamed observation, or nothing when exhausted.
using ObservationStream = std::function<std::optional<Observation>()>;

struct StreamOptions {
  bool intercept = false;
  /// Record every stride-th iterate (the final iterate is always recorded).
  std::size_t stride = 1;
  std::optional<VectorXd> target;
};

/// beta^{t+1} = beta^t - V_{(x^t, y^t)}(beta^t) / (mu (t + 1)).
SolverTrace stochastic_approx(const LinkFunction& link, const ObservationStream& stream,
                              const VectorXd& beta0, double mu, std::size_t T,
                              const StreamOptions& options = {});

/// Drives V_N to ||V_N(beta)|| <= tol (1 + ||beta||) by a safeguarded
/// fixed-point iteration and returns the solution. Throws NotConvergedError.
VectorXd solve_empirical_vi(const LinkFunction& link, const Dataset& data, const VectorXd& beta0,
                            double tol = 1e-11, std::size_t max_iter = 200000);

}  // namespace glmvi
