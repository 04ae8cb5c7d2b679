#include "glmvi/rng.hpp"

#include <cmath>

#include "glmvi/error.hpp"

namespace glmvi {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

Philox4x32::Counter Philox4x32::block(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (used_ == 4) {
    buffer_ = block(counter_, key_);
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
    used_ = 0;
  }
  return buffer_[used_++];
}

double uniform_open01(Philox4x32& gen) noexcept {
  const std::uint64_t a = gen() >> 5;  // 27 bits
  const std::uint64_t b = gen() >> 6;  // 26 bits
  const std::uint64_t k = (a << 26) | b;
  return (static_cast<double>(k) + 0.5) * 0x1p-53;
}

std::uint64_t sample_poisson(Philox4x32& gen, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw GenerationError("poisson sampler: invalid mean " + std::to_string(mean));
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    const double u = uniform_open01(gen);
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    // Tail mass below 1e-300 for mean < 30 is reached long before k = 1000.
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform_open01(gen) - 0.5;
    const double v = uniform_open01(gen);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace glmvi
