#pragma once

// Patchwork-style statistical embedding over 8-bit rectangular carriers.
//
// A key selects a balanced binary pattern S over the pixels of a block. To
// carry a 1 bit, every pixel under a pattern 1 (the C set) is raised by k;
// a 0 bit leaves the block untouched. The receiver splits each block into C
// and D with the same pattern and computes
//
//   q = (mean(C) - mean(D)) / sqrt((var(C) + var(D)) / (|S| / 2))
//
// which is asymptotically N(0, 1) on unmarked blocks. A block decodes as 1
// iff q > z_alpha, the upper alpha quantile of N(0, 1).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pestego/bytes.hpp"

namespace pestego::stat {

/// q reported for a zero-variance block whose C and D means differ.
inline constexpr double kDegenerateQ = 1e300;

struct Carrier {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }
  bool operator==(const Carrier&) const = default;
};

struct CarrierBlock {
  std::size_t index = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> values;  // row-major, rows * cols

  bool operator==(const CarrierBlock&) const = default;
};

/// Pattern bits are 0 or 1; exactly half are 1.
struct KeyPattern {
  std::vector<std::uint8_t> bits;
  std::size_t ones = 0;

  std::size_t size() const { return bits.size(); }
  bool operator==(const KeyPattern&) const = default;
};

struct StatParams {
  std::uint32_t block_rows = 8;
  std::uint32_t block_cols = 8;
  int k = 10;
  double alpha = 0.05;
  double z_alpha = 0.0;

  std::size_t block_len() const { return std::size_t{block_rows} * block_cols; }

  /// Validates and fills z_alpha = Phi^-1(1 - alpha). Throws InvalidParams.
  static StatParams make(std::uint32_t block_rows, std::uint32_t block_cols, int k, double alpha);
};

struct MessageLayout {
  std::vector<std::uint8_t> bits;  // each 0 or 1

  std::size_t block_count() const { return bits.size(); }
};

struct DetectionStatistic {
  double q = 0.0;
  double sigma_hat = 0.0;
  double mean_c = 0.0;
  double mean_d = 0.0;
};

struct SplitSets {
  std::vector<std::uint8_t> c;
  std::vector<std::uint8_t> d;
};

/// Deterministic balanced pattern for (key, block_len): a vector of
/// block_len/2 ones followed by zeros, Fisher-Yates shuffled with a
/// SplitMix64 stream seeded by key_seed(key, block_len). Throws
/// OddBlockLength for odd or < 2 lengths.
KeyPattern derive_pattern(ByteView key, std::size_t block_len);

/// Throws LengthMismatch.
SplitSets split_block(const CarrierBlock& block, const KeyPattern& pattern);

/// bit 0 returns the block unchanged; bit 1 adds k (saturating at 255) to
/// every pattern-1 position. Throws LengthMismatch or InvalidParams.
CarrierBlock embed_bit(CarrierBlock block, const KeyPattern& pattern, int k, int bit);

/// Means, unbiased (n - 1) variances and q. Throws LengthMismatch or
/// BlockTooSmall (|C| < 2).
DetectionStatistic statistic(const CarrierBlock& block, const KeyPattern& pattern);

/// 1 iff q > z_alpha.
int detect_bit(const DetectionStatistic& stat, const StatParams& params);

/// Full blocks available, counted over the row-major block grid; partial
/// edge blocks are not counted.
std::size_t block_capacity(const Carrier& carrier, const StatParams& params);

CarrierBlock read_block(const Carrier& carrier, const StatParams& params, std::size_t index);
void write_block(Carrier& carrier, const CarrierBlock& block);

/// Throws CarrierTooSmall when the message needs more blocks than exist.
Carrier embed_message(const Carrier& carrier, ByteView key, const MessageLayout& message, const StatParams& params);

/// Per-block statistics for the first bit_count blocks.
std::vector<DetectionStatistic> block_statistics(const Carrier& carrier, ByteView key, std::size_t bit_count,
                                                 const StatParams& params);

std::vector<std::uint8_t> extract_message(const Carrier& carrier, ByteView key, std::size_t bit_count,
                                          const StatParams& params);

}  // namespace pestego::stat
