#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "glmvi/bench.hpp"
#include "glmvi/error.hpp"
#include "glmvi/inference.hpp"
#include "glmvi/linalg.hpp"
#include "glmvi/operators.hpp"
#include "glmvi/solvers.hpp"
#include "glmvi/synth.hpp"

namespace glmvi::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("NaN");
}

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::vector<double>> to_rows(const MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_vector(m.row(i).transpose()));
  return rows;
}

// JSON numbers cannot be inf or NaN.
ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

// Data source shared by the subcommands: a CSV file or a synthetic draw.
struct DataArgs {
  std::string csv;
  int d = 10;
  std::size_t N = 100;
  std::string beta_star = "dense";
  std::uint64_t seed = 0;
  bool intercept = false;
  double noise_sd = 1.0;

  void add_to(CLI::App* app, bool with_file) {
    if (with_file) app->add_option("--data", csv, "Dataset CSV (x_1..x_d,y); synthetic when omitted");
    app->add_option("--d", d, "Covariate dimension")->check(CLI::PositiveNumber);
    app->add_option("--N", N, "Sample size")->check(CLI::PositiveNumber);
    app->add_option("--beta-star", beta_star, "dense | sparse");
    app->add_option("--seed", seed, "Seed");
    app->add_flag("--intercept", intercept, "Include an intercept column");
    app->add_option("--noise-sd", noise_sd, "Noise level for the gaussian family");
  }

  ExperimentConfig config(const LinkFunction& link, const Family& family) const {
    ExperimentConfig c;
    c.d = d;
    c.N = N;
    c.link = link;
    c.family = family;
    c.beta_star = parse_beta_star(beta_star);
    c.seed = seed;
    c.intercept = intercept;
    c.noise_sd = noise_sd;
    return c;
  }

  Dataset load(const LinkFunction& link, const Family& family) const {
    if (csv.empty()) return generate(config(link, family));
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot open data file '" + csv + "'");
    return read_csv(in, intercept);
  }
};

std::map<std::string, double> parse_params(const std::string& body, const std::string& what) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(what + ": expected key=value, got '" + item + "'");
    double v = 0.0;
    const std::string val = item.substr(eq + 1);
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size()) {
      throw ConfigError(what + ": bad number '" + val + "'");
    }
    out[item.substr(0, eq)] = v;
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key, const std::string& what,
            std::optional<double> fallback = std::nullopt) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw ConfigError(what + ": missing '" + key + "'");
  }
  const double v = it->second;
  params.erase(it);
  return v;
}

// theoretical | rm:mu=.. | decay:eta0=..,rate=.. | constant:eta=..
StepSchedule parse_schedule(const std::string& spec, const LinkFunction& link, const Dataset& data) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  auto params = colon == std::string::npos ? std::map<std::string, double>{}
                                           : parse_params(spec.substr(colon + 1), "schedule");
  StepSchedule s = StepSchedule::constant(1.0);
  if (name == "theoretical") {
    const auto mu = link.monotone_modulus();
    if (!mu) throw ConfigError("schedule: theoretical step needs a link with a monotone modulus");
    const double sigma = min_singular_value(data.design());
    const double modulus = *mu * sigma * sigma / static_cast<double>(data.size());
    if (!(modulus > 0.0)) throw ConfigError("schedule: design is rank deficient (modulus 0)");
    s = StepSchedule::theoretical_fp(modulus, link.lipschitz(), data.dim(), data.max_abs_design());
  } else if (name == "rm") {
    s = StepSchedule::robbins_monro(take(params, "mu", "schedule"));
  } else if (name == "decay") {
    const double eta0 = take(params, "eta0", "schedule", kExperimentEta0);
    const double rate = take(params, "rate", "schedule", kExperimentDecayRate);
    s = StepSchedule::experiment_decay_for(data.size(), std::max(1, data.dim()), eta0, rate);
  } else if (name == "constant") {
    s = StepSchedule::constant(take(params, "eta", "schedule"));
  } else {
    throw ConfigError("unknown schedule '" + name + "'");
  }
  if (!params.empty()) throw ConfigError("schedule: unknown parameter '" + params.begin()->first + "'");
  return s;
}

void write_trace(std::ostream& out, const SolverTrace& trace) {
  const auto p = trace.iterates.empty() ? 0 : trace.iterates.front().size();
  out << "t,operator_norm";
  for (Eigen::Index j = 0; j < p; ++j) out << ",beta_" << j;
  out << '\n';
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    out << trace.steps[i] << ',' << fmt(trace.operator_norms[i]);
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << fmt(trace.iterates[i](j));
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return f;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GLM estimation by variational inequalities and maximum likelihood"};
  app.require_subcommand(1);

  std::string link_spec = "softplus";
  std::string family_spec = "poisson";
  unsigned threads = default_threads();

  // fit
  auto* fit = app.add_subcommand("fit", "Run a solver and print the final iterate");
  DataArgs fit_data;
  fit_data.add_to(fit, true);
  std::string method = "vi";
  std::string schedule_spec = "decay";
  std::size_t iters = 100;
  std::string trace_path;
  bool stream = false;
  fit->add_option("--method", method, "vi | mle")->check(CLI::IsMember({"vi", "mle"}));
  fit->add_option("--link", link_spec, "Inverse link spec");
  fit->add_option("--family", family_spec, "Response family");
  fit->add_option("--schedule", schedule_spec,
                  "theoretical | rm:mu=.. | decay:eta0=..,rate=.. | constant:eta=..");
  fit->add_option("--iters", iters, "Iterations T")->check(CLI::PositiveNumber);
  fit->add_option("--trace", trace_path, "Write the full trace as CSV");
  fit->add_flag("--stream", stream, "Stochastic approximation over the rows (vi with rm only)");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV plus JSON sidecar");
  DataArgs gen_data;
  gen_data.add_to(gen, false);
  std::string gen_out;
  gen->add_option("--link", link_spec, "Inverse link spec");
  gen->add_option("--family", family_spec, "Response family");
  gen->add_option("--out", gen_out, "Output CSV path (sidecar at <out>.json)")->required();

  // minty-check
  auto* minty = app.add_subcommand("minty-check", "Minty diagnostics around the VI solution");
  DataArgs minty_data;
  minty_data.add_to(minty, true);
  MintyProbe probe;
  minty->add_option("--link", link_spec, "Inverse link spec");
  minty->add_option("--family", family_spec, "Response family for synthetic data");
  minty->add_option("--directions", probe.directions, "Probe directions")->check(CLI::PositiveNumber);
  minty->add_option("--probe-seed", probe.seed, "Seed for probe directions");

  // covcheck
  auto* cov = app.add_subcommand("covcheck", "Monte-Carlo check of sandwich coverage");
  DataArgs cov_data;
  cov_data.add_to(cov, false);
  std::size_t cov_reps = 500;
  cov->add_option("--link", link_spec, "Inverse link spec");
  cov->add_option("--family", family_spec, "Response family");
  cov->add_option("--reps", cov_reps, "Replications (>= 100)");
  cov->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Monte-Carlo grid of VI versus MLE errors");
  std::string grid_path, bench_out;
  std::optional<std::size_t> bench_reps;
  bool full = false, desk = false, quiet = false;
  bench->add_option("--grid", grid_path, "Grid JSON file");
  bench->add_option("--out", bench_out, "Output CSV path (stdout when omitted)");
  bench->add_option("--reps", bench_reps, "Override the replication count")->check(CLI::PositiveNumber);
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--full-grid", full, "Full four-link grid with 1000 replications (hours)");
  bench->add_flag("--desk-grid", desk, "Softplus desk-scale grid");
  bench->add_flag("--quiet", quiet, "No progress on stderr");

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "Per-iteration errors of both methods on one dataset");
  DataArgs traj_data;
  traj_data.add_to(traj, false);
  BenchSchedule traj_schedule;
  std::size_t traj_iters = 200;
  std::string traj_out;
  traj->add_option("--link", link_spec, "Inverse link spec");
  traj->add_option("--family", family_spec, "Response family");
  traj->add_option("--iters", traj_iters, "Iterations T")->check(CLI::PositiveNumber);
  traj->add_option("--eta0", traj_schedule.eta0, "Base step");
  traj->add_option("--rate", traj_schedule.rate, "Per-iteration decay");
  traj->add_option("--out", traj_out, "Output CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*fit) {
      const LinkFunction link = parse_link(link_spec);
      const Family family = parse_family(family_spec);
      const Dataset data = fit_data.load(link, family);
      const VectorXd beta0 = VectorXd::Zero(data.param_dim());
      SolverTrace trace;
      if (stream) {
        if (method != "vi") throw ConfigError("--stream requires --method vi");
        const auto colon = schedule_spec.find(':');
        if (schedule_spec.substr(0, colon) != "rm") throw ConfigError("--stream requires an rm schedule");
        auto params = parse_params(schedule_spec.substr(colon + 1), "schedule");
        const double mu = take(params, "mu", "schedule");
        std::size_t next = 0;
        ObservationStream source = [&]() -> std::optional<Observation> {
          if (next >= data.size()) return std::nullopt;
          return data.observation(next++);
        };
        StreamOptions so;
        so.intercept = data.intercept();
        trace = stochastic_approx(link, source, beta0, mu, iters, so);
      } else {
        const StepSchedule schedule = parse_schedule(schedule_spec, link, data);
        trace = method == "vi" ? vi_fixed_point_solve(link, data, beta0, schedule, iters)
                               : mle_gd_solve(family, link, data, beta0, schedule, iters);
      }
      if (!trace_path.empty()) {
        auto f = open_out(trace_path);
        write_trace(f, trace);
      }
      out << "index,beta\n";
      const VectorXd& b = trace.final_iterate();
      for (Eigen::Index j = 0; j < b.size(); ++j) out << j << ',' << fmt(b(j)) << '\n';
      return 0;
    }

    if (*gen) {
      const ExperimentConfig cfg = gen_data.config(parse_link(link_spec), parse_family(family_spec));
      const Dataset data = generate(cfg);
      {
        auto f = open_out(gen_out);
        write_csv(f, data);
      }
      auto side = open_out(gen_out + ".json");
      side << config_json(cfg) << '\n';
      return 0;
    }

    if (*minty) {
      const LinkFunction link = parse_link(link_spec);
      const Dataset data = minty_data.load(link, parse_family(family_spec));
      const MintyReport r = minty_lemma1(link, data, probe);
      ordered_json j;
      j["sigma_min"] = r.sigma_min;
      j["modulus_lemma1"] = r.modulus_lemma1 ? ordered_json(*r.modulus_lemma1) : ordered_json(nullptr);
      j["grid_min_ratio"] = number_or_null(r.grid_min_ratio);
      j["satisfied"] = r.satisfied;
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*cov) {
      const ExperimentConfig cfg = cov_data.config(parse_link(link_spec), parse_family(family_spec));
      const CoverageReport r = normality_check(cfg, cov_reps, threads);
      ordered_json j;
      j["coverage_per_coord"] = r.coverage_per_coord;
      j["mean_sandwich"] = to_rows(r.mean_sandwich);
      j["mc_covariance"] = to_rows(r.mc_covariance);
      j["standardized_frobenius"] = r.standardized_frobenius;
      j["excluded_reps"] = r.excluded_reps;
      out << j.dump(2) << '\n';
      return 0;
    }

    if (*bench) {
      if (static_cast<int>(full) + static_cast<int>(desk) + static_cast<int>(!grid_path.empty()) != 1) {
        throw ConfigError("benchmark: give exactly one of --grid, --desk-grid, --full-grid");
      }
      GridSpec spec;
      if (full) {
        spec = full_grid();
      } else if (desk) {
        spec = desk_grid();
      } else {
        std::ifstream in(grid_path);
        if (!in) throw ConfigError("cannot open grid file '" + grid_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        spec = parse_grid_json(ss.str());
      }
      if (bench_reps) spec.reps = *bench_reps;
      spec.validate();
      ProgressCallback progress;
      if (!quiet) {
        progress = [&err](std::size_t done, std::size_t total) {
          err << "cell group " << done << "/" << total << '\n';
        };
      }
      auto cells = run_grid(spec, threads, progress);
      if (bench_out.empty()) {
        write_grid_csv(out, std::move(cells));
      } else {
        auto f = open_out(bench_out);
        write_grid_csv(f, std::move(cells));
      }
      return 0;
    }

    if (*traj) {
      const LinkFunction link = parse_link(link_spec);
      const Family family = parse_family(family_spec);
      if (traj_data.intercept) throw ConfigError("trajectory: intercept is not supported");
      const auto r = trajectory_run(link, traj_data.d, traj_data.N, traj_schedule, traj_data.seed,
                                    traj_iters, parse_beta_star(traj_data.beta_star), family);
      if (traj_out.empty()) {
        write_trajectory_csv(out, r, traj_iters);
      } else {
        auto f = open_out(traj_out);
        write_trajectory_csv(f, r, traj_iters);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace glmvi::cli
