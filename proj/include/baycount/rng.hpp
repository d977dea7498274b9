#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace baycount {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// The stream is a pure function of (seed, stream_id, call count), so two
/// streams built from the same pair produce identical sequences on every
/// platform. The 64-bit seed is the Philox key; the 128-bit counter holds
/// the stream id in its upper half and the block index in its lower half.
class RngStream {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform draw on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
  static Block philox(Block counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int used_ = 4;  // 32-bit words of buffer_ already consumed
};

/// SplitMix64 finalizer; used to fold structured keys into stream ids.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives a substream id from a tag and up to three integer coordinates.
constexpr std::uint64_t stream_key(std::uint64_t tag, std::uint64_t a = 0,
                                   std::uint64_t b = 0,
                                   std::uint64_t c = 0) noexcept {
  std::uint64_t h = mix64(tag);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return mix64(h ^ c);
}

}  // namespace baycount
