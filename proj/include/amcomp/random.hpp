#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace amcomp {

/// One Philox4x32-10 block: ten rounds of the counter under the key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key selects the seed and the upper 64 bits of the counter
/// select the stream, so independent streams can be derived from
/// (seed, stream id) without any shared state. Satisfies
/// UniformRandomBitGenerator with 64-bit output.
class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Skips ahead by n 128-bit blocks.
  void discard_blocks(std::uint64_t n) { counter_lo_ += n; buffered_ = 0; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t counter_lo_ = 0;
  std::uint64_t counter_hi_;
  std::array<std::uint32_t, 4> block_{};
  int buffered_ = 0;
};

/// Mixes a parent seed with a component tag into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Philox stream for (seed, stream id).
inline Philox make_stream(std::uint64_t seed, std::uint64_t stream) { return Philox(seed, stream); }

/// Standard normal draw. Stateless apart from the engine, so results do not
/// depend on a distribution object's cached second value.
double standard_normal(Philox& rng);

/// Both Box-Muller outputs of one uniform pair; the first equals what
/// standard_normal would have returned.
std::pair<double, double> standard_normal_pair(Philox& rng);

/// Uniform draw on [0, 1).
double uniform01(Philox& rng);

}  // namespace amcomp
