#pragma once

#include <cstdint>
#include <string_view>

#include "pestego/bytes.hpp"

namespace pestego {

/// "0x"-prefixed text is decoded as hex (even number of digits); anything
/// else is taken as its UTF-8 bytes. Throws InvalidParams on bad hex.
Bytes parse_key(std::string_view text);

/// FNV-1a (64-bit) over `key` followed by the 8 little-endian bytes of
/// `block_len`. This is the seed for pattern derivation.
std::uint64_t key_seed(ByteView key, std::uint64_t block_len);

/// SplitMix64 generator; small, fully specified, identical everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace pestego
