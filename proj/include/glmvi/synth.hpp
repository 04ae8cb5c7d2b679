#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "glmvi/dataset.hpp"
#include "glmvi/families.hpp"
#include "glmvi/links.hpp"

namespace glmvi {

enum class BetaStar { dense, sparse, custom };

struct ExperimentConfig {
  int d = 10;
  std::size_t N = 100;
  LinkFunction link = LinkFunction::softplus();
  Family family = Family::poisson();
  BetaStar beta_star = BetaStar::dense;
  /// Used when beta_star is custom; length d (+1 with intercept).
  VectorXd custom_beta;
  bool intercept = false;
  std::uint64_t seed = 0;
  /// Noise level for the gaussian family.
  double noise_sd = 1.0;
};

/// Coefficients on the covariates: dense d^{-1/2} (1, ..., 1) or sparse
/// (2/sqrt5, 1/sqrt5, 0, ..., 0).
VectorXd beta_star_vector(BetaStar kind, int d);

/// Full parameter beta* matching the config's design (intercept entry 0 first
/// when enabled). Throws ConfigError on bad shapes.
VectorXd true_parameter(const ExperimentConfig& config);

/// x ~ N(0, I_d) row by row, then y_i from the family with mean
/// g^{-1}(x~_i' beta*). Deterministic in config.seed.
Dataset generate(const ExperimentConfig& config);

BetaStar parse_beta_star(const std::string& name);
std::string beta_star_name(BetaStar kind);

/// Header `x_1,...,x_d,y`, one row per observation, shortest round-trip doubles.
void write_csv(std::ostream& out, const Dataset& data);
/// Reads a CSV written by write_csv (last column is y). Throws ConfigError.
Dataset read_csv(std::istream& in, bool intercept);
/// Config and seed as a JSON object.
std::string config_json(const ExperimentConfig& config);

}  // namespace glmvi
