#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "glmvi/error.hpp"
#include "glmvi/rng.hpp"

using namespace glmvi;

TEST_SUITE("rng") {
  TEST_CASE("philox known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("stream is the block sequence over counters") {
    Philox4x32 g(0);
    const auto b0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    const auto b1 = Philox4x32::block({1, 0, 0, 0}, {0, 0});
    for (int i = 0; i < 4; ++i) CHECK(g() == b0[i]);
    for (int i = 0; i < 4; ++i) CHECK(g() == b1[i]);
  }

  TEST_CASE("determinism and seed separation") {
    Philox4x32 a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a();
      CHECK(x == b());
      differs = differs || x != c();
    }
    CHECK(differs);
  }

  TEST_CASE("uniforms lie in the open interval") {
    Philox4x32 g(7);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
      const double u = uniform_open01(g);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
      sum += u;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 100000));
  }

  TEST_CASE("normal draws through the standard distribution") {
    Philox4x32 g(8);
    std::normal_distribution<double> n;
    double s = 0, s2 = 0;
    const int m = 100000;
    for (int i = 0; i < m; ++i) {
      const double x = n(g);
      s += x;
      s2 += x * x;
    }
    CHECK(std::abs(s / m) < 4 / std::sqrt(double(m)));
    CHECK(std::abs(s2 / m - 1.0) < 0.02);
  }

  TEST_CASE("poisson moments in both sampler regimes") {
    for (double lambda : {0.3, 2.0, 12.0, 29.5, 30.0, 55.0, 400.0}) {
      CAPTURE(lambda);
      Philox4x32 g(static_cast<std::uint64_t>(lambda * 1000));
      const int m = 100000;
      double s = 0, s2 = 0;
      for (int i = 0; i < m; ++i) {
        const double k = static_cast<double>(sample_poisson(g, lambda));
        s += k;
        s2 += k * k;
      }
      const double mean = s / m;
      const double var = s2 / m - mean * mean;
      CHECK(std::abs(mean - lambda) <= 4 * std::sqrt(lambda / m));
      CHECK(std::abs(var - lambda) <= 0.1 * lambda);
    }
  }

  TEST_CASE("poisson probabilities at a large mean") {
    // Chi-square style check of the PTRS branch against the exact pmf.
    const double lambda = 45.0;
    Philox4x32 g(99);
    const int m = 200000;
    std::vector<int> counts(200, 0);
    for (int i = 0; i < m; ++i) ++counts[std::min<std::uint64_t>(199, sample_poisson(g, lambda))];
    for (int k = 35; k <= 55; k += 5) {
      const double p = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
      const double expected = m * p;
      CHECK(std::abs(counts[k] - expected) <= 5 * std::sqrt(expected));
    }
  }

  TEST_CASE("poisson edge cases") {
    Philox4x32 g(1);
    CHECK(sample_poisson(g, 0.0) == 0);
    CHECK_THROWS_AS(sample_poisson(g, -0.1), GenerationError);
    CHECK_THROWS_AS(sample_poisson(g, std::numeric_limits<double>::infinity()), GenerationError);
    CHECK_THROWS_AS(sample_poisson(g, std::numeric_limits<double>::quiet_NaN()), GenerationError);
  }
}
