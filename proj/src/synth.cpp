#include "glmvi/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "glmvi/error.hpp"
#include "glmvi/rng.hpp"

namespace glmvi {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("failed to format number");
  return std::string(buf, end);
}

void validate(const ExperimentConfig& c) {
  if (c.d < 1) throw ConfigError("experiment config: d must be at least 1");
  if (c.N < 1) throw ConfigError("experiment config: N must be at least 1");
  if (c.family.kind == FamilyKind::gaussian && !(c.noise_sd >= 0.0)) {
    throw ConfigError("experiment config: noise_sd must be nonnegative");
  }
}

}  // namespace

VectorXd beta_star_vector(BetaStar kind, int d) {
  if (d < 1) throw ConfigError("beta_star: d must be at least 1");
  switch (kind) {
    case BetaStar::dense:
      return VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    case BetaStar::sparse: {
      if (d < 2) throw ConfigError("beta_star: the sparse vector needs d >= 2");
      VectorXd b = VectorXd::Zero(d);
      b(0) = 2.0 / std::sqrt(5.0);
      b(1) = 1.0 / std::sqrt(5.0);
      return b;
    }
    case BetaStar::custom:
      break;
  }
  throw ConfigError("beta_star: custom vectors must be given explicitly");
}

VectorXd true_parameter(const ExperimentConfig& c) {
  validate(c);
  const int p = c.d + (c.intercept ? 1 : 0);
  if (c.beta_star == BetaStar::custom) {
    if (c.custom_beta.size() != p) {
      throw ConfigError("beta_star: custom vector has length " +
                        std::to_string(c.custom_beta.size()) + ", expected " + std::to_string(p));
    }
    return c.custom_beta;
  }
  const VectorXd b = beta_star_vector(c.beta_star, c.d);
  if (!c.intercept) return b;
  VectorXd full = VectorXd::Zero(p);
  full.tail(c.d) = b;
  return full;
}

Dataset generate(const ExperimentConfig& c) {
  const VectorXd beta = true_parameter(c);
  Philox4x32 gen(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(c.N);
  MatrixXd X(n, c.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < c.d; ++j) X(i, j) = normal(gen);
  }
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = X.row(i).dot(beta.tail(c.d));
    if (c.intercept) z += beta(0);
    const double mean = c.link.eval(z);
    if (!std::isfinite(mean)) {
      throw GenerationError("generate: link " + c.link.name() + " produced a non-finite mean");
    }
    switch (c.family.kind) {
      case FamilyKind::gaussian:
        y(i) = mean + c.noise_sd * normal(gen);
        break;
      case FamilyKind::bernoulli:
        if (mean < 0.0 || mean > 1.0) {
          throw GenerationError("generate: link " + c.link.name() +
                                " produced a mean outside [0, 1] for the bernoulli family");
        }
        y(i) = uniform_open01(gen) < mean ? 1.0 : 0.0;
        break;
      case FamilyKind::poisson:
        if (mean < 0.0) {
          throw GenerationError("generate: link " + c.link.name() +
                                " produced a negative mean for the poisson family");
        }
        y(i) = static_cast<double>(sample_poisson(gen, mean));
        break;
      case FamilyKind::exponential:
        if (!(mean > 0.0)) {
          throw GenerationError("generate: link " + c.link.name() +
                                " produced a nonpositive mean for the exponential family");
        }
        y(i) = -mean * std::log(uniform_open01(gen));
        break;
    }
  }
  return Dataset(std::move(X), std::move(y), c.intercept);
}

BetaStar parse_beta_star(const std::string& name) {
  if (name == "dense") return BetaStar::dense;
  if (name == "sparse") return BetaStar::sparse;
  if (name == "custom") return BetaStar::custom;
  throw ConfigError("unknown beta_star '" + name + "' (expected dense or sparse)");
}

std::string beta_star_name(BetaStar kind) {
  switch (kind) {
    case BetaStar::dense: return "dense";
    case BetaStar::sparse: return "sparse";
    case BetaStar::custom: return "custom";
  }
  return "custom";
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (int j = 0; j < data.dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "y\n";
  const MatrixXd& X = data.covariates();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int j = 0; j < data.dim(); ++j) out << format_double(X(r, j)) << ',';
    out << format_double(data.responses()(r)) << '\n';
  }
}

Dataset read_csv(std::istream& in, bool intercept) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: missing header");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  if (cols < 2) throw ConfigError("csv: need at least one covariate column and y");
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma) {
        throw ConfigError("csv: bad number on data row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++count;
      p = comma + 1;
    }
    if (count != cols) {
      throw ConfigError("csv: row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                        " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  const auto n = static_cast<Eigen::Index>(rows);
  const auto d = static_cast<Eigen::Index>(cols - 1);
  MatrixXd X(n, d);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = values[i * cols + j];
    y(i) = values[i * cols + d];
  }
  return Dataset(std::move(X), std::move(y), intercept);
}

std::string config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["d"] = c.d;
  j["N"] = c.N;
  j["link"] = c.link.to_spec();
  j["family"] = c.family.name();
  j["beta_star"] = beta_star_name(c.beta_star);
  const VectorXd beta = true_parameter(c);
  j["beta"] = std::vector<double>(beta.data(), beta.data() + beta.size());
  j["intercept"] = c.intercept;
  j["seed"] = c.seed;
  if (c.family.kind == FamilyKind::gaussian) j["noise_sd"] = c.noise_sd;
  return j.dump(2);
}

}  // namespace glmvi
