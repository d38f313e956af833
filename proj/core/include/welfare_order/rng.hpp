#pragma once

#include <array>
#include <cstdint>

namespace welfare_order {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer, used to derive independent seeds from a base seed
// and a tag (e.g. the society-size stream of a convergence sweep).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Counter-based random stream. The stream is fully determined by
/// (seed, stream_id); the engine uses one stream per Monte Carlo sample so
/// results do not depend on how samples are distributed across threads.
///
/// All transforms below are implemented here rather than through
/// <random> distributions, whose output is implementation-defined.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on (0, 1).
  double uniform_open() noexcept;
  // Uniform on (-1, 1) on a grid symmetric about zero, so the law of the
  // draw equals the law of its negation exactly.
  double symmetric_unit() noexcept;
  // Standard normal by Box-Muller; consumes two 64-bit words per draw.
  double normal() noexcept;
  // Gamma(shape, 1) by Marsaglia-Tsang, with the shape < 1 boost.
  double gamma(double shape) noexcept;
  // Fair +1 / -1.
  int coin() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;  // 64-bit words left in buffer_ (0, 1 or 2)
};

}  // namespace welfare_order
