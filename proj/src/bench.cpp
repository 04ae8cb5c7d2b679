#include "glmvi/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "glmvi/error.hpp"
#include "glmvi/parallel.hpp"

namespace glmvi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("failed to format number");
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Squared error at each budget, NaN once the solver has diverged.
std::vector<double> errors_at(const std::vector<std::size_t>& budgets, const SolverTrace& trace,
                              std::optional<std::size_t> diverged_at) {
  std::vector<double> out;
  out.reserve(budgets.size());
  for (std::size_t k : budgets) {
    if (diverged_at && k >= *diverged_at) {
      out.push_back(kNaN);
    } else {
      out.push_back((*trace.errors_to_target)[k]);
    }
  }
  return out;
}

struct RunOutcome {
  SolverTrace trace;
  std::optional<std::size_t> diverged_at;
};

template <typename Solve>
RunOutcome guarded(Solve&& solve) {
  try {
    return {solve(), std::nullopt};
  } catch (const DivergenceError& e) {
    return {e.trace(), e.iteration()};
  } catch (const DomainError&) {
    // A mean leaving the loss domain is a divergence of the iteration too.
    return {SolverTrace{}, std::size_t{0}};
  }
}

void mean_sd(const std::vector<double>& values, double& mean, double& sd, std::size_t& diverged) {
  double sum = 0.0;
  std::size_t n = 0;
  diverged = 0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++diverged;
      continue;
    }
    sum += v;
    ++n;
  }
  if (n == 0) {
    mean = kNaN;
    sd = kNaN;
    return;
  }
  mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
  }
  sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

template <typename T>
std::vector<T> read_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("grid: missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("grid: '") + key + "' must be a list");
  std::vector<T> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() <= 0) {
      throw ConfigError(std::string("grid: '") + key + "' entries must be positive integers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (reps < 1) throw ConfigError("grid: reps must be at least 1");
  if (links.empty() || dims.empty() || sample_sizes.empty() || iter_budgets.empty()) {
    throw ConfigError("grid: links, dims, sample_sizes and iter_budgets must be nonempty");
  }
  for (int d : dims) {
    if (d < 1) throw ConfigError("grid: dims must be positive");
    if (beta_star == BetaStar::sparse && d < 2) throw ConfigError("grid: sparse beta* needs d >= 2");
  }
  for (auto n : sample_sizes) {
    if (n < 1) throw ConfigError("grid: sample sizes must be positive");
  }
  for (auto k : iter_budgets) {
    if (k < 1) throw ConfigError("grid: iteration budgets must be positive");
  }
  if (beta_star == BetaStar::custom) throw ConfigError("grid: beta_star must be dense or sparse");
  if (!(schedule.eta0 > 0.0) || !(schedule.rate > 0.0)) {
    throw ConfigError("grid: schedule eta0 and rate must be positive");
  }
}

std::uint64_t cell_seed(std::uint64_t base_seed, const LinkFunction& link, int d, std::size_t N,
                        BetaStar beta_star, const Family& family) {
  const std::string key = link.to_spec() + '|' + std::to_string(d) + '|' + std::to_string(N) +
                          '|' + beta_star_name(beta_star) + '|' + family.name();
  return splitmix64(base_seed ^ splitmix64(fnv1a(key)));
}

std::vector<CellResult> run_cell_budgets(const LinkFunction& link, int d, std::size_t N,
                                         const std::vector<std::size_t>& budgets, std::size_t reps,
                                         const BenchSchedule& schedule, BetaStar beta_star,
                                         std::uint64_t base_seed, const Family& family,
                                         unsigned threads) {
  if (budgets.empty()) throw ConfigError("run_cell: no iteration budgets");
  if (reps < 1) throw ConfigError("run_cell: reps must be at least 1");
  const std::size_t T = *std::max_element(budgets.begin(), budgets.end());
  const StepSchedule steps = schedule.for_cell(N, d);
  const std::uint64_t seed0 = cell_seed(base_seed, link, d, N, beta_star, family);

  ExperimentConfig base;
  base.d = d;
  base.N = N;
  base.link = link;
  base.family = family;
  base.beta_star = beta_star;
  const VectorXd truth = true_parameter(base);

  std::vector<std::vector<double>> err_vi(reps), err_mle(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    ExperimentConfig cfg = base;
    cfg.seed = seed0 + r;
    const Dataset data = generate(cfg);
    const VectorXd beta0 = VectorXd::Zero(truth.size());
    SolveOptions opts;
    opts.target = truth;
    const RunOutcome vi =
        guarded([&] { return vi_fixed_point_solve(link, data, beta0, steps, T, opts); });
    const RunOutcome mle =
        guarded([&] { return mle_gd_solve(family, link, data, beta0, steps, T, opts); });
    err_vi[r] = errors_at(budgets, vi.trace, vi.diverged_at);
    err_mle[r] = errors_at(budgets, mle.trace, mle.diverged_at);
  });

  std::vector<CellResult> out;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    CellResult cell;
    cell.link = link.to_spec();
    cell.d = d;
    cell.N = N;
    cell.k = budgets[b];
    cell.reps = reps;
    std::vector<double> v(reps), m(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      v[r] = err_vi[r][b];
      m[r] = err_mle[r][b];
    }
    mean_sd(v, cell.mean_sq_error_vi, cell.sd_vi, cell.diverged_vi);
    mean_sd(m, cell.mean_sq_error_mle, cell.sd_mle, cell.diverged_mle);
    out.push_back(std::move(cell));
  }
  return out;
}

CellResult run_cell(const LinkFunction& link, int d, std::size_t N, std::size_t k,
                    std::size_t reps, const BenchSchedule& schedule, BetaStar beta_star,
                    std::uint64_t base_seed, const Family& family, unsigned threads) {
  return run_cell_budgets(link, d, N, {k}, reps, schedule, beta_star, base_seed, family, threads)
      .front();
}

std::vector<CellResult> run_grid(const GridSpec& spec, unsigned threads,
                                 const ProgressCallback& progress) {
  spec.validate();
  std::vector<std::size_t> budgets = spec.iter_budgets;
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  const std::size_t total = spec.links.size() * spec.dims.size() * spec.sample_sizes.size();
  std::size_t done = 0;
  std::vector<CellResult> out;
  for (const auto& link : spec.links) {
    for (int d : spec.dims) {
      for (std::size_t N : spec.sample_sizes) {
        auto cells = run_cell_budgets(link, d, N, budgets, spec.reps, spec.schedule,
                                      spec.beta_star, spec.base_seed, spec.family, threads);
        for (auto& c : cells) out.push_back(std::move(c));
        if (progress) progress(++done, total);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.link, a.d, a.N, a.k) < std::tie(b.link, b.d, b.N, b.k);
  });
  return out;
}

void write_grid_csv(std::ostream& out, std::vector<CellResult> cells) {
  std::stable_sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.link, a.d, a.N, a.k) < std::tie(b.link, b.d, b.N, b.k);
  });
  out << "link,d,N,k,method,mean,sd,reps,diverged\n";
  for (const auto& c : cells) {
    const std::string prefix = csv_field(c.link) + ',' + std::to_string(c.d) + ',' +
                               std::to_string(c.N) + ',' + std::to_string(c.k) + ',';
    out << prefix << "mle," << format_double(c.mean_sq_error_mle) << ','
        << format_double(c.sd_mle) << ',' << c.reps << ',' << c.diverged_mle << '\n';
    out << prefix << "vi," << format_double(c.mean_sq_error_vi) << ',' << format_double(c.sd_vi)
        << ',' << c.reps << ',' << c.diverged_vi << '\n';
  }
}

GridSpec parse_grid_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("grid: top level must be an object");
  static const std::vector<std::string> known = {"links",  "dims",      "sample_sizes",
                                                 "iter_budgets", "reps", "beta_star",
                                                 "family", "schedule",  "base_seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("grid: unknown key '" + key + "'");
    }
  }
  GridSpec spec;
  try {
    if (!j.contains("links") || !j["links"].is_array()) {
      throw ConfigError("grid: 'links' must be a list of link specs");
    }
    for (const auto& l : j["links"]) {
      if (!l.is_string()) throw ConfigError("grid: link entries must be strings");
      spec.links.push_back(parse_link(l.get<std::string>()));
    }
    spec.dims = read_list<int>(j, "dims");
    spec.sample_sizes = read_list<std::size_t>(j, "sample_sizes");
    spec.iter_budgets = read_list<std::size_t>(j, "iter_budgets");
    if (j.contains("reps")) {
      if (!j["reps"].is_number_integer() || j["reps"].get<long long>() < 1) {
        throw ConfigError("grid: reps must be a positive integer");
      }
      spec.reps = j["reps"].get<std::size_t>();
    }
    if (j.contains("beta_star")) spec.beta_star = parse_beta_star(j["beta_star"].get<std::string>());
    if (j.contains("family")) spec.family = parse_family(j["family"].get<std::string>());
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      if (!s.is_object()) throw ConfigError("grid: schedule must be an object");
      for (const auto& [key, _] : s.items()) {
        if (key != "eta0" && key != "rate") throw ConfigError("grid: unknown schedule key '" + key + "'");
      }
      if (s.contains("eta0")) spec.schedule.eta0 = s["eta0"].get<double>();
      if (s.contains("rate")) spec.schedule.rate = s["rate"].get<double>();
    }
    if (j.contains("base_seed")) spec.base_seed = j["base_seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  spec.validate();
  return spec;
}

GridSpec desk_grid() {
  GridSpec g;
  g.links = {LinkFunction::softplus()};
  g.dims = {10, 20};
  g.sample_sizes = {100, 1000};
  g.iter_budgets = {20, 50, 100, 200};
  g.reps = 200;
  return g;
}

GridSpec full_grid() {
  GridSpec g;
  g.links = {LinkFunction::exp(), LinkFunction::softplus(), LinkFunction::clipped_exp(0.0, 2.0),
             LinkFunction::gmm_cdf_experiment()};
  g.dims = {10, 20, 50, 100};
  g.sample_sizes = {100, 200, 500, 1000};
  g.iter_budgets = {20, 50, 100, 200};
  g.reps = 1000;
  return g;
}

TrajectoryResult trajectory_run(const LinkFunction& link, int d, std::size_t N,
                                const BenchSchedule& schedule, std::uint64_t seed, std::size_t T,
                                BetaStar beta_star, const Family& family) {
  ExperimentConfig cfg;
  cfg.d = d;
  cfg.N = N;
  cfg.link = link;
  cfg.family = family;
  cfg.beta_star = beta_star;
  cfg.seed = seed;
  TrajectoryResult out;
  out.beta_star = true_parameter(cfg);
  out.data = generate(cfg);
  const StepSchedule steps = schedule.for_cell(N, d);
  const VectorXd beta0 = VectorXd::Zero(out.beta_star.size());
  SolveOptions opts;
  opts.target = out.beta_star;
  RunOutcome vi = guarded([&] { return vi_fixed_point_solve(link, out.data, beta0, steps, T, opts); });
  RunOutcome mle =
      guarded([&] { return mle_gd_solve(family, link, out.data, beta0, steps, T, opts); });
  out.vi = std::move(vi.trace);
  out.vi_diverged_at = vi.diverged_at;
  out.mle = std::move(mle.trace);
  out.mle_diverged_at = mle.diverged_at;
  return out;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryResult& result, std::size_t T) {
  auto value = [](const SolverTrace& t, std::size_t k) {
    if (!t.errors_to_target || k >= t.errors_to_target->size()) return kNaN;
    return (*t.errors_to_target)[k];
  };
  out << "k,err_vi,err_mle\n";
  for (std::size_t k = 0; k <= T; ++k) {
    out << k << ',' << format_double(value(result.vi, k)) << ','
        << format_double(value(result.mle, k)) << '\n';
  }
}

}  // namespace glmvi
