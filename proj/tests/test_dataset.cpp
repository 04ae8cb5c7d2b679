#include <doctest.h>

#include <limits>

#include "glmvi/dataset.hpp"
#include "glmvi/error.hpp"

using namespace glmvi;

TEST_SUITE("dataset") {
  TEST_CASE("augmentation and design") {
    MatrixXd X(2, 2);
    X << 1, -2, 3, 0.5;
    VectorXd y(2);
    y << 1, 0;
    const Dataset with(X, y, true);
    CHECK(with.dim() == 2);
    CHECK(with.param_dim() == 3);
    CHECK(with.design().col(0).isOnes());
    CHECK(with.design().rightCols(2) == X);
    CHECK(with.max_abs_covariate() == 3.0);
    CHECK(with.max_abs_design() == 3.0);
    const Dataset without(X, y, false);
    CHECK(without.param_dim() == 2);
    CHECK(without.design() == X);
    VectorXd x(1);
    x << 4;
    CHECK(augment(x, true)(0) == 1.0);
    CHECK(augment(x, true)(1) == 4.0);
    CHECK(augment(x, false)(0) == 4.0);
  }

  TEST_CASE("intercept-only design") {
    const Dataset d(MatrixXd(3, 0), VectorXd::Ones(3), true);
    CHECK(d.dim() == 0);
    CHECK(d.param_dim() == 1);
    CHECK(d.max_abs_covariate() == 0.0);
    CHECK(d.max_abs_design() == 1.0);
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(Dataset(MatrixXd::Zero(2, 1), VectorXd::Zero(3), false), ShapeError);
    MatrixXd X = MatrixXd::Zero(2, 1);
    X(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Dataset(X, VectorXd::Zero(2), false), DomainError);
    std::vector<Observation> obs{{VectorXd::Zero(2), 1.0}, {VectorXd::Zero(3), 1.0}};
    CHECK_THROWS_AS(Dataset::from_observations(obs, false), ShapeError);
  }

  TEST_CASE("observations, slices and concatenation") {
    MatrixXd X(4, 1);
    X << 1, 2, 3, 4;
    VectorXd y(4);
    y << 10, 20, 30, 40;
    Dataset d(X, y, true);
    CHECK(d.observation(2).x(0) == 3.0);
    CHECK(d.observation(2).y == 30.0);
    const Dataset a = d.slice(0, 1);
    const Dataset b = d.slice(1, 3);
    CHECK(a.size() == 1);
    CHECK(b.size() == 3);
    const Dataset c = Dataset::concat(a, b);
    CHECK(c.covariates() == X);
    CHECK(c.responses() == y);
    CHECK_THROWS_AS(d.slice(3, 2), ShapeError);
    CHECK_THROWS_AS(Dataset::concat(a, Dataset(X, y, false)), ShapeError);
    CHECK(d.max_abs_covariate_response() == 160.0);
    CHECK_FALSE(d.residual_bound());
    d.set_residual_bound(2.5);
    CHECK(*d.residual_bound() == 2.5);
    std::vector<Observation> obs{d.observation(0), d.observation(3)};
    const Dataset e = Dataset::from_observations(obs, true);
    CHECK(e.responses()(1) == 40.0);
  }
}
