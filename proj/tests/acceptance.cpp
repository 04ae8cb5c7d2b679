// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "glmvi/bench.hpp"
#include "glmvi/error.hpp"
#include "glmvi/inference.hpp"
#include "glmvi/linalg.hpp"
#include "glmvi/operators.hpp"
#include "glmvi/parallel.hpp"
#include "glmvi/solvers.hpp"
#include "glmvi/synth.hpp"

using namespace glmvi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs, budget_seconds, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double s) {
  std::normal_distribution<double> n(0.0, s);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

Outcome canonical_equivalence() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  struct P {
    Family f;
    LinkFunction g;
  };
  const std::vector<P> pairs = {{Family::gaussian(), LinkFunction::identity()},
                                {Family::bernoulli(), LinkFunction::sigmoid()},
                                {Family::poisson(), LinkFunction::exp()},
                                {Family::exponential(), LinkFunction::reciprocal()}};
  double worst = 0.0;
  for (const auto& [f, g] : pairs) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 40, d = 3;
      MatrixXd X = gaussian(rng, n, d, 0.5);
      VectorXd beta = gaussian(rng, d + 1, 1, 0.5).col(0);
      VectorXd y(n);
      for (int i = 0; i < n; ++i) {
        switch (f.kind) {
          case FamilyKind::gaussian: y(i) = 2 * u01(rng) - 1; break;
          case FamilyKind::bernoulli: y(i) = u01(rng) < 0.5 ? 0 : 1; break;
          case FamilyKind::poisson: y(i) = std::floor(5 * u01(rng)); break;
          case FamilyKind::exponential: y(i) = 0.1 + 2 * u01(rng); break;
        }
      }
      if (f.kind == FamilyKind::exponential) {
        // Keep z = x~'beta positive and away from zero.
        X = X.cwiseAbs();
        beta = beta.cwiseAbs();
        beta(0) += 1.0;
      }
      const Dataset data(X, y, true);
      const VectorXd dev = empirical_mle_grad(f, g, data, beta) - f.canonical_sign() * empirical_vi(g, data, beta);
      worst = std::max(worst, dev.cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt("max |grad L_N - s V_N|_inf = %.2e over 4 pairs x 100 (tol 1e-12)", worst)};
}

struct TableCell {
  int d;
  std::size_t N, k;
  double vi, mle;
};
const TableCell kTable2[] = {{10, 100, 20, 0.627, 0.713}, {20, 500, 100, 0.215, 0.320}, {10, 1000, 200, 0.045, 0.094}};

Outcome table2() {
  bool ok = true;
  std::string detail;
  for (const auto& c : kTable2) {
    const auto r = run_cell(LinkFunction::softplus(), c.d, c.N, c.k, 200, {}, BetaStar::dense, 1,
                            Family::poisson(), threads());
    const bool cell_ok = std::abs(r.mean_sq_error_vi - c.vi) <= 0.03 &&
                         std::abs(r.mean_sq_error_mle - c.mle) <= 0.03 &&
                         r.mean_sq_error_vi < r.mean_sq_error_mle;
    ok = ok && cell_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s(d=%d,N=%zu,k=%zu) vi %.3f/%.3f mle %.3f/%.3f", detail.empty() ? "" : "; ",
                  c.d, c.N, c.k, r.mean_sq_error_vi, c.vi, r.mean_sq_error_mle, c.mle);
    detail += buf;
  }
  return {ok, detail + " (got/target, tol 0.03, vi < mle)"};
}

Outcome log_identity() {
  double cell_gap = 0.0, traj_gap = 0.0;
  for (const auto& c : kTable2) {
    const auto r = run_cell(LinkFunction::exp(), c.d, c.N, c.k, 200, {}, BetaStar::dense, 1,
                            Family::poisson(), threads());
    cell_gap = std::max(cell_gap, std::abs(r.mean_sq_error_vi - r.mean_sq_error_mle));
    if (r.diverged_vi != r.diverged_mle) cell_gap = INFINITY;
    const auto t = trajectory_run(LinkFunction::exp(), c.d, c.N, {}, 1, c.k);
    if (t.vi_diverged_at || t.mle_diverged_at) return {false, "trajectory diverged"};
    for (std::size_t i = 0; i < t.vi.iterates.size(); ++i) {
      traj_gap = std::max(traj_gap, (t.vi.iterates[i] - t.mle.iterates[i]).cwiseAbs().maxCoeff());
      traj_gap = std::max(traj_gap, std::abs((*t.vi.errors_to_target)[i] - (*t.mle.errors_to_target)[i]));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max cell |vi - mle| = %.2e (tol 1e-9), max trajectory deviation = %.2e (tol 1e-10)",
                cell_gap, traj_gap);
  return {cell_gap <= 1e-9 && traj_gap <= 1e-10, buf};
}

Outcome contraction() {
  std::mt19937_64 rng(4);
  const int n = 200, d = 3;
  const MatrixXd X = gaussian(rng, n, d, 1.0);
  const VectorXd y = X * VectorXd::Constant(d, 1.0 / std::sqrt(3.0)) + gaussian(rng, n, 1, 1.0).col(0);
  const Dataset data(X, y, true);
  const double sigma = min_singular_value(data.design());
  const double mu = sigma * sigma / n;  // mu_g = 1
  const double M = data.max_abs_covariate();
  const auto sched = StepSchedule::theoretical_fp(mu, 1.0, d, M);
  const double rho = std::sqrt(sched.contraction_factor());
  const MatrixXd& Xt = data.design();
  const VectorXd target = (Xt.transpose() * Xt).ldlt().solve(Xt.transpose() * y);
  const auto tr = vi_fixed_point_solve(LinkFunction::identity(), data, VectorXd::Zero(d + 1), sched, 2000);
  double worst = -INFINITY;
  for (std::size_t t = 0; t + 1 < tr.iterates.size(); ++t) {
    const double lhs = (tr.iterates[t + 1] - target).norm();
    const double rhs = rho * (tr.iterates[t] - target).norm() + 1e-10;
    worst = std::max(worst, lhs - rhs);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "mu=%.4f M=%.3f factor=%.8f, max violation over 2000 steps = %.2e (must be <= 0)", mu,
                M, rho, worst);
  return {worst <= 0.0, buf};
}

Outcome sa_rate() {
  const std::vector<std::size_t> checkpoints = {100, 1000, 10000};
  const std::size_t reps = 100;
  std::vector<std::vector<double>> sq(reps);
  parallel_for(reps, threads(), [&](std::size_t r) {
    std::mt19937_64 rng(5000 + r);
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    const double truth = 1.0;
    ObservationStream s = [&]() -> std::optional<Observation> {
      Observation o;
      o.x = VectorXd::Constant(1, sign(rng) ? 1.0 : -1.0);
      o.y = truth * o.x(0) + noise(rng);
      return o;
    };
    StreamOptions so;
    so.stride = 100;
    so.target = VectorXd::Constant(1, truth);
    // E[x^2] = 1 is the strong monotonicity modulus.
    const auto tr = stochastic_approx(LinkFunction::identity(), s, VectorXd::Zero(1), 1.0, 10000, so);
    for (std::size_t t : checkpoints) {
      const auto it = std::find(tr.steps.begin(), tr.steps.end(), t);
      sq[r].push_back((*tr.errors_to_target)[static_cast<std::size_t>(it - tr.steps.begin())]);
    }
  });
  std::vector<double> lx, ly;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    double m = 0;
    for (std::size_t r = 0; r < reps; ++r) m += sq[r][c];
    lx.push_back(std::log(static_cast<double>(checkpoints[c])));
    ly.push_back(std::log(m / reps));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= -1.3 && slope <= -0.7, fmt("log-log MSE slope over t in {1e2,1e3,1e4} = %.3f (band [-1.3, -0.7])", slope)};
}

Outcome coverage() {
  bool ok = true;
  std::string detail;
  struct Case {
    const char* name;
    LinkFunction link;
    Family family;
  };
  for (const Case& c : {Case{"gaussian/identity", LinkFunction::identity(), Family::gaussian()},
                        Case{"poisson/softplus", LinkFunction::softplus(), Family::poisson()}}) {
    ExperimentConfig cfg;
    cfg.d = 2;
    cfg.N = 2000;
    cfg.link = c.link;
    cfg.family = c.family;
    cfg.seed = 1;
    const auto r = normality_check(cfg, 500, threads());
    bool case_ok = r.excluded_reps == 0 && r.standardized_frobenius <= 0.2;
    for (double v : r.coverage_per_coord) case_ok = case_ok && v >= 0.91 && v <= 0.98;
    ok = ok && case_ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s coverage (%.3f, %.3f) frob %.3f excluded %zu seed %llu", detail.empty() ? "" : "; ",
                  c.name, r.coverage_per_coord[0], r.coverage_per_coord[1], r.standardized_frobenius, r.excluded_reps,
                  static_cast<unsigned long long>(cfg.seed));
    detail += buf;
  }
  return {ok, detail + " (coverage in [0.91, 0.98], frob <= 0.2)"};
}

Outcome efficiency() {
  ExperimentConfig cfg;
  cfg.d = 3;
  cfg.N = 100000;
  cfg.seed = 7;
  cfg.link = LinkFunction::softplus();
  const Dataset sp = generate(cfg);
  const VectorXd truth = true_parameter(cfg);
  const auto pop = model_covariances(cfg.family, cfg.link, sp, truth);
  const double eig_model = min_eigenvalue(pop.vi - pop.mle);
  const auto vi = vi_sandwich(cfg.link, sp, truth, false);
  const auto mle = mle_sandwich(cfg.family, cfg.link, sp, truth, false);
  const double eig_plugin = min_eigenvalue(vi.sandwich - mle.sandwich);

  cfg.link = LinkFunction::exp();
  const Dataset ex = generate(cfg);
  const auto pe = model_covariances(cfg.family, cfg.link, ex, truth);
  const double gap_model = (pe.vi - pe.mle).norm() / pe.mle.norm();
  const auto vie = vi_sandwich(cfg.link, ex, truth, false);
  const auto mlee = mle_sandwich(cfg.family, cfg.link, ex, truth, false);
  const double gap_plugin = (vie.sandwich - mlee.sandwich).norm() / mlee.sandwich.norm();
  const double gap_cross = (vie.sandwich - pe.mle).norm() / pe.mle.norm();

  char buf[320];
  std::snprintf(buf, sizeof buf,
                "softplus min eig(S_VI - S_MLE) model %.4f plug-in %.4f (>= -1e-3); exp rel gap model %.1e "
                "plug-in %.1e empirical-vs-Fisher %.4f (<= 0.02)",
                eig_model, eig_plugin, gap_model, gap_plugin, gap_cross);
  const bool ok = eig_model >= -1e-3 && eig_plugin >= -1e-3 && gap_model <= 0.02 && gap_plugin <= 0.02 &&
                  gap_cross <= 0.02;
  return {ok, buf};
}

Outcome minty() {
  VectorXd y(2);
  y << 1, -1;
  const Dataset scalar(MatrixXd(2, 0), y, true);
  const MintyReport ms = minty_lemma1(LinkFunction::minty_sine(), scalar, {}, VectorXd::Zero(1));
  const auto prop = minty_from_weak_monotone(0.1, 1.0, 0.8);
  MatrixXd H(4, 2);
  H << 1, 1, -1, 1, 1, -1, -1, -1;
  VectorXd yh(4);
  yh << 0.5, -0.2, 1.0, 0.3;
  const MintyReport mo = minty_lemma1(LinkFunction::identity(), Dataset(H, yh, true));
  const double lemma = mo.modulus_lemma1.value_or(NAN);
  char buf[200];
  std::snprintf(buf, sizeof buf, "minty_sine grid ratio %.6f (>= 0.5 - 1e-9); proposition %.15g (= 0.6); singular-value modulus %.15g (= 1)",
                ms.grid_min_ratio, prop.value_or(NAN), lemma);
  const bool ok = ms.grid_min_ratio >= 0.5 - 1e-9 && prop && std::abs(*prop - 0.6) <= 1e-12 &&
                  std::abs(lemma - 1.0) <= 1e-12;
  return {ok, buf};
}

Outcome plateau() {
  const Dataset data(MatrixXd(1, 0), VectorXd::Ones(1), true);
  const auto link = LinkFunction::clipped_exp(1.0, 5.0);
  const VectorXd beta0 = VectorXd::Constant(1, 3.0);
  // Constant step 1/L with L = C = 5.
  const auto sched = StepSchedule::constant(1.0 / link.lipschitz());
  const std::size_t T = 10000;
  const auto mle = mle_gd_solve(Family::poisson(), link, data, beta0, sched, T);
  bool stationary = true;
  for (const auto& b : mle.iterates) stationary = stationary && b(0) == 3.0;
  const auto vi = vi_fixed_point_solve(link, data, beta0, sched, T);
  std::size_t hit = T + 1;
  for (std::size_t t = 0; t < vi.iterates.size(); ++t) {
    if (std::abs(vi.iterates[t](0)) <= 1e-3) {
      hit = t;
      break;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "mle stationary at 3 for %zu iterations: %s; vi reaches |beta| <= 1e-3 at iteration %zu (<= 1e4)",
                T, stationary ? "yes" : "no", hit);
  return {stationary && hit <= T, buf};
}

Outcome theorem1() {
  // Identity link, intercept plus two Rademacher covariates, uniform noise on [-1, 1]:
  // E[x~ x~'] = I so mu = 1, M = 1 and |y - x~'beta*| <= R = 1.
  const int d = 2;
  const std::size_t N = 1000, reps = 500;
  VectorXd truth(d + 1);
  truth << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  std::vector<double> err(reps);
  parallel_for(reps, threads(), [&](std::size_t r) {
    std::mt19937_64 rng(10000 + r);
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    MatrixXd X(N, d);
    VectorXd y(N);
    for (std::size_t i = 0; i < N; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = sign(rng) ? 1.0 : -1.0;
      y(i) = truth(0) + X.row(i).dot(truth.tail(d)) + noise(rng);
    }
    const Dataset data(X, y, true);
    const VectorXd b = solve_empirical_vi(LinkFunction::identity(), data, VectorXd::Zero(d + 1));
    err[r] = (b - truth).norm();
  });
  std::sort(err.begin(), err.end());
  const double q95 = err[static_cast<std::size_t>(std::ceil(0.95 * reps)) - 1];
  const double bound = theorem1_bound(1.0, 1.0, 1.0, d, N, 0.05);
  char buf[160];
  std::snprintf(buf, sizeof buf, "0.95 quantile of |beta_hat - beta*| = %.4f <= bound %.4f", q95, bound);
  return {q95 <= bound, buf};
}

}  // namespace

int main() {
  criterion(1, "canonical equivalence", 1, canonical_equivalence);
  criterion(2, "softplus table reproduction", 300, table2);
  criterion(3, "log-link identity", 120, log_identity);
  criterion(4, "fixed-point contraction", 1, contraction);
  criterion(5, "stochastic approximation rate", 30, sa_rate);
  criterion(6, "Wald coverage", 120, coverage);
  criterion(7, "efficiency ordering", 30, efficiency);
  criterion(8, "Minty diagnostics", 5, minty);
  criterion(9, "plateau negative control", 1, plateau);
  criterion(10, "finite-sample bound", 60, theorem1);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
