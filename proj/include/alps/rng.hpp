#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace alps {

/// One Philox4x32-10 block: ten rounds of the counter under the key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Philox4x32-10 counter-based generator.
///
/// A stream is identified by a 64-bit key (the run seed) and two 32-bit
/// stream words; the remaining 64 bits of the counter enumerate blocks.
/// Two streams with different (seed, purpose, index) triples never share a
/// block, so per-level streams keyed by (level, sweep) give identical
/// trajectories whether levels are updated serially or on worker threads.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept;

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() noexcept;

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stream purposes; combined with a level or chain index in the low bits.
namespace purpose {
inline constexpr std::uint32_t kLevel = 0x0100;     // + level index
inline constexpr std::uint32_t kSwap = 0x0200;
inline constexpr std::uint32_t kHot = 0x0300;       // + hot chain index
inline constexpr std::uint32_t kInit = 0x0400;
inline constexpr std::uint32_t kScaling = 0x0500;   // + dimension slot
inline constexpr std::uint32_t kTest = 0x0F00;
}  // namespace purpose

}  // namespace alps
