#include <doctest.h>

#include <random>

#include "glmvi/error.hpp"
#include "glmvi/linalg.hpp"
#include "test_util.hpp"

using namespace glmvi;

TEST_SUITE("linalg") {
  TEST_CASE("well-conditioned inverse has no ridge") {
    std::mt19937_64 rng(31);
    const MatrixXd A = testutil::gaussian_matrix(rng, 20, 4);
    const MatrixXd S = A.transpose() * A;
    const auto inv = symmetric_inverse(S);
    CHECK(inv.ridge == 0.0);
    CHECK((inv.inverse * S - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(inv.inverse == inv.inverse.transpose());
  }

  TEST_CASE("ill-conditioned matrix gets a ridge") {
    MatrixXd S = MatrixXd::Identity(3, 3);
    S(2, 2) = 1e-14;
    const auto inv = symmetric_inverse(S);
    CHECK(inv.ridge == doctest::Approx(1e-8 * S.trace() / 3.0));
    CHECK(inv.inverse.allFinite());
    CHECK(inv.condition <= kMaxCondition);
  }

  TEST_CASE("singular beyond rescue") {
    CHECK_THROWS_AS(symmetric_inverse(MatrixXd::Zero(2, 2)), SingularityError);
    MatrixXd bad = MatrixXd::Identity(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(symmetric_inverse(bad), SingularityError);
    CHECK_THROWS_AS(symmetric_inverse(MatrixXd::Zero(2, 3)), ShapeError);
  }

  TEST_CASE("singular values and eigenvalues") {
    MatrixXd A(3, 2);
    A << 3, 0, 0, 2, 0, 0;
    CHECK(min_singular_value(A) == doctest::Approx(2.0));
    MatrixXd dup(3, 2);
    dup << 1, 1, 2, 2, 3, 3;
    CHECK(min_singular_value(dup) < 1e-12);
    CHECK(min_singular_value(MatrixXd::Ones(1, 3)) == 0.0);
    MatrixXd S(2, 2);
    S << 2, 1, 1, 2;
    CHECK(min_eigenvalue(S) == doctest::Approx(1.0));
    CHECK(max_eigenvalue(S) == doctest::Approx(3.0));
    const MatrixXd R = inverse_sqrt(S);
    CHECK((R * S * R - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(inverse_sqrt(-S), SingularityError);
  }

  TEST_CASE("sandwich is symmetric") {
    std::mt19937_64 rng(32);
    const MatrixXd A = testutil::gaussian_matrix(rng, 30, 5);
    const MatrixXd B = testutil::gaussian_matrix(rng, 30, 5);
    const MatrixXd J = A.transpose() * A / 30.0;
    const MatrixXd G = B.transpose() * B / 30.0;
    double ridge = -1;
    const MatrixXd S = sandwich(J, G, &ridge);
    CHECK(ridge == 0.0);
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    const MatrixXd Ji = J.inverse();
    CHECK((S - Ji * G * Ji.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}
