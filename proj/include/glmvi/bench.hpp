#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "glmvi/solvers.hpp"
#include "glmvi/synth.hpp"

namespace glmvi {

/// eta^k = eta0 * sqrt(N / d) * rate^k, instantiated per cell.
struct BenchSchedule {
  double eta0 = kExperimentEta0;
  double rate = kExperimentDecayRate;

  StepSchedule for_cell(std::size_t N, int d) const {
    return StepSchedule::experiment_decay_for(N, d, eta0, rate);
  }
};

struct GridSpec {
  std::vector<LinkFunction> links;
  std::vector<int> dims;
  std::vector<std::size_t> sample_sizes;
  std::vector<std::size_t> iter_budgets;
  std::size_t reps = 100;
  BetaStar beta_star = BetaStar::dense;
  Family family = Family::poisson();
  BenchSchedule schedule;
  std::uint64_t base_seed = 1;

  /// Throws ConfigError unless reps >= 1 and every list is nonempty and positive.
  void validate() const;
};

struct CellResult {
  std::string link;
  int d = 0;
  std::size_t N = 0;
  std::size_t k = 0;
  std::size_t reps = 0;
  double mean_sq_error_vi = 0.0;
  double sd_vi = 0.0;
  double mean_sq_error_mle = 0.0;
  double sd_mle = 0.0;
  std::size_t diverged_vi = 0;
  std::size_t diverged_mle = 0;
};

/// Seed shared by every replication of a (link, d, N, beta*, family) cell;
/// replication r uses cell_seed + r. Independent of k and of visit order.
std::uint64_t cell_seed(std::uint64_t base_seed, const LinkFunction& link, int d, std::size_t N,
                        BetaStar beta_star, const Family& family);

/// Runs both solvers from beta = 0 for max(budgets) iterations per
/// replication and reads |beta^k - beta*|^2 at every budget k, so all
/// budgets share the same data. Results follow the order of `budgets`.
std::vector<CellResult> run_cell_budgets(const LinkFunction& link, int d, std::size_t N,
                                         const std::vector<std::size_t>& budgets, std::size_t reps,
                                         const BenchSchedule& schedule, BetaStar beta_star,
                                         std::uint64_t base_seed,
                                         const Family& family = Family::poisson(),
                                         unsigned threads = 1);

CellResult run_cell(const LinkFunction& link, int d, std::size_t N, std::size_t k,
                    std::size_t reps, const BenchSchedule& schedule, BetaStar beta_star,
                    std::uint64_t base_seed, const Family& family = Family::poisson(),
                    unsigned threads = 1);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Every (link, d, N, k) cell, sorted by (link, d, N, k).
std::vector<CellResult> run_grid(const GridSpec& spec, unsigned threads = 1,
                                 const ProgressCallback& progress = {});

/// Header `link,d,N,k,method,mean,sd,reps,diverged`, two rows per cell
/// (mle before vi), rows sorted by (link, d, N, k, method).
void write_grid_csv(std::ostream& out, std::vector<CellResult> cells);

/// Parses a grid JSON object: links, dims, sample_sizes, iter_budgets, reps,
/// beta_star, family, schedule {eta0, rate}, base_seed. Throws ConfigError.
GridSpec parse_grid_json(const std::string& text);

/// softplus x d {10, 20} x N {100, 1000} x k {20, 50, 100, 200}.
GridSpec desk_grid();
/// Four links x d {10, 20, 50, 100} x N {100, 200, 500, 1000} x k {20, 50,
/// 100, 200} with 1000 replications. Long running.
GridSpec full_grid();

struct TrajectoryResult {
  SolverTrace vi;
  SolverTrace mle;
  /// First iterate index that failed the divergence guard.
  std::optional<std::size_t> vi_diverged_at;
  std::optional<std::size_t> mle_diverged_at;
  VectorXd beta_star;
  Dataset data;
};

/// One dataset, both methods from beta = 0 for T iterations.
TrajectoryResult trajectory_run(const LinkFunction& link, int d, std::size_t N,
                                const BenchSchedule& schedule, std::uint64_t seed, std::size_t T,
                                BetaStar beta_star = BetaStar::dense,
                                const Family& family = Family::poisson());

/// Columns k,err_vi,err_mle for k = 0..T; NaN from a divergence onward.
void write_trajectory_csv(std::ostream& out, const TrajectoryResult& result, std::size_t T);

}  // namespace glmvi
