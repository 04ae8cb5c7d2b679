#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace glmvi {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key is
/// the 64-bit seed; each block of four outputs consumes one counter value, so
/// streams with different seeds are independent and need no shared state.
/// Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// The raw 10-round bijection.
  static Counter block(Counter counter, Key key) noexcept;

 private:
  Key key_;
  Counter counter_{};
  Counter buffer_{};
  int used_ = 4;
};

/// Uniform double in the open interval (0, 1) with 53 random bits.
double uniform_open01(Philox4x32& gen) noexcept;

/// Exact Poisson draw: sequential-search inversion for mean < 30, Hormann's
/// transformed rejection (PTRS) otherwise. mean must be finite and >= 0.
std::uint64_t sample_poisson(Philox4x32& gen, double mean);

}  // namespace glmvi
