#include "pestego/stat_stego.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pestego/error.hpp"
#include "pestego/key.hpp"
#include "pestego/normal.hpp"

namespace pestego::stat {
namespace {

void check_pattern(std::size_t block_len, const KeyPattern& pattern) {
  if (pattern.size() != block_len)
    throw Error(ErrorCode::LengthMismatch, "pattern length " + std::to_string(pattern.size()) +
                                               " != block length " + std::to_string(block_len));
  const auto ones = static_cast<std::size_t>(std::count(pattern.bits.begin(), pattern.bits.end(), 1));
  const bool binary = std::all_of(pattern.bits.begin(), pattern.bits.end(), [](std::uint8_t b) { return b <= 1; });
  if (!binary || ones * 2 != pattern.size() || ones != pattern.ones)
    throw Error(ErrorCode::InvalidParams, "key pattern is not a balanced 0/1 mask");
}

void check_block(const CarrierBlock& block) {
  if (std::size_t{block.rows} * block.cols != block.values.size())
    throw Error(ErrorCode::LengthMismatch, "block shape does not match its value count");
}

void check_carrier(const Carrier& carrier) {
  if (std::size_t{carrier.width} * carrier.height != carrier.pixels.size())
    throw Error(ErrorCode::BadCarrier, "carrier pixel count does not match width * height");
}

double mean(const std::vector<std::uint8_t>& v) {
  double s = 0;
  for (auto x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<std::uint8_t>& v, double m) {
  double s = 0;
  for (auto x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

StatParams StatParams::make(std::uint32_t block_rows, std::uint32_t block_cols, int k, double alpha) {
  if (block_rows == 0 || block_cols == 0)
    throw Error(ErrorCode::InvalidParams, "block dimensions must be positive");
  if ((std::size_t{block_rows} * block_cols) % 2 != 0)
    throw Error(ErrorCode::OddBlockLength, "block " + std::to_string(block_cols) + "x" + std::to_string(block_rows) +
                                               " has an odd number of pixels");
  if (k < 1 || k > 255) throw Error(ErrorCode::InvalidParams, "k must be in [1, 255]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidParams, "alpha must be in (0, 1)");
  StatParams p;
  p.block_rows = block_rows;
  p.block_cols = block_cols;
  p.k = k;
  p.alpha = alpha;
  p.z_alpha = normal_quantile(1.0 - alpha);
  return p;
}

KeyPattern derive_pattern(ByteView key, std::size_t block_len) {
  if (block_len < 2 || block_len % 2 != 0)
    throw Error(ErrorCode::OddBlockLength, "pattern length " + std::to_string(block_len) + " is not an even number >= 2");
  KeyPattern pattern;
  pattern.bits.assign(block_len, 0);
  std::fill_n(pattern.bits.begin(), block_len / 2, std::uint8_t{1});
  pattern.ones = block_len / 2;

  SplitMix64 rng(key_seed(key, block_len));
  for (std::size_t i = block_len - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(pattern.bits[i], pattern.bits[j]);
  }
  return pattern;
}

SplitSets split_block(const CarrierBlock& block, const KeyPattern& pattern) {
  check_block(block);
  check_pattern(block.values.size(), pattern);
  SplitSets sets;
  sets.c.reserve(pattern.ones);
  sets.d.reserve(pattern.ones);
  for (std::size_t i = 0; i < block.values.size(); ++i)
    (pattern.bits[i] ? sets.c : sets.d).push_back(block.values[i]);
  return sets;
}

CarrierBlock embed_bit(CarrierBlock block, const KeyPattern& pattern, int k, int bit) {
  check_block(block);
  check_pattern(block.values.size(), pattern);
  if (bit != 0 && bit != 1) throw Error(ErrorCode::InvalidParams, "bit must be 0 or 1");
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be positive");
  if (bit == 0) return block;
  for (std::size_t i = 0; i < block.values.size(); ++i) {
    if (pattern.bits[i]) block.values[i] = static_cast<std::uint8_t>(std::min(255, block.values[i] + k));
  }
  return block;
}

DetectionStatistic statistic(const CarrierBlock& block, const KeyPattern& pattern) {
  const auto sets = split_block(block, pattern);
  if (sets.c.size() < 2)
    throw Error(ErrorCode::BlockTooSmall, "block needs at least 4 pixels for a variance estimate");
  DetectionStatistic st;
  st.mean_c = mean(sets.c);
  st.mean_d = mean(sets.d);
  const double var_c = sample_variance(sets.c, st.mean_c);
  const double var_d = sample_variance(sets.d, st.mean_d);
  const double half = static_cast<double>(pattern.size()) / 2.0;
  st.sigma_hat = std::sqrt((var_c + var_d) / half);
  const double diff = st.mean_c - st.mean_d;
  if (st.sigma_hat > 0.0)
    st.q = diff / st.sigma_hat;
  else
    st.q = diff == 0.0 ? 0.0 : std::copysign(kDegenerateQ, diff);
  return st;
}

int detect_bit(const DetectionStatistic& stat, const StatParams& params) { return stat.q > params.z_alpha ? 1 : 0; }

std::size_t block_capacity(const Carrier& carrier, const StatParams& params) {
  check_carrier(carrier);
  if (params.block_rows == 0 || params.block_cols == 0) return 0;
  return std::size_t{carrier.width / params.block_cols} * (carrier.height / params.block_rows);
}

CarrierBlock read_block(const Carrier& carrier, const StatParams& params, std::size_t index) {
  const std::size_t count = block_capacity(carrier, params);
  if (index >= count)
    throw Error(ErrorCode::CarrierTooSmall,
                "block " + std::to_string(index) + " requested; carrier has " + std::to_string(count));
  const std::size_t grid_cols = carrier.width / params.block_cols;
  const std::size_t x0 = (index % grid_cols) * params.block_cols;
  const std::size_t y0 = (index / grid_cols) * params.block_rows;

  CarrierBlock block;
  block.index = index;
  block.rows = params.block_rows;
  block.cols = params.block_cols;
  block.values.reserve(params.block_len());
  for (std::size_t y = 0; y < params.block_rows; ++y) {
    const auto row = carrier.pixels.begin() + static_cast<std::ptrdiff_t>((y0 + y) * carrier.width + x0);
    block.values.insert(block.values.end(), row, row + params.block_cols);
  }
  return block;
}

void write_block(Carrier& carrier, const CarrierBlock& block) {
  check_carrier(carrier);
  check_block(block);
  if (block.cols == 0 || block.rows == 0) return;
  const std::size_t grid_cols = carrier.width / block.cols;
  const std::size_t grid_rows = carrier.height / block.rows;
  if (block.index >= grid_cols * grid_rows)
    throw Error(ErrorCode::CarrierTooSmall, "block index outside the carrier grid");
  const std::size_t x0 = (block.index % grid_cols) * block.cols;
  const std::size_t y0 = (block.index / grid_cols) * block.rows;
  for (std::size_t y = 0; y < block.rows; ++y) {
    const auto src = block.values.begin() + static_cast<std::ptrdiff_t>(y * block.cols);
    std::copy(src, src + block.cols,
              carrier.pixels.begin() + static_cast<std::ptrdiff_t>((y0 + y) * carrier.width + x0));
  }
}

Carrier embed_message(const Carrier& carrier, ByteView key, const MessageLayout& message, const StatParams& params) {
  const std::size_t available = block_capacity(carrier, params);
  if (message.block_count() > available)
    throw Error(ErrorCode::CarrierTooSmall, "message needs " + std::to_string(message.block_count()) +
                                                " blocks; carrier holds " + std::to_string(available));
  const KeyPattern pattern = derive_pattern(key, params.block_len());
  Carrier out = carrier;
  for (std::size_t i = 0; i < message.bits.size(); ++i) {
    if (message.bits[i] > 1) throw Error(ErrorCode::InvalidParams, "message bits must be 0 or 1");
    if (message.bits[i] == 0) continue;
    write_block(out, embed_bit(read_block(carrier, params, i), pattern, params.k, 1));
  }
  return out;
}

std::vector<DetectionStatistic> block_statistics(const Carrier& carrier, ByteView key, std::size_t bit_count,
                                                 const StatParams& params) {
  const std::size_t available = block_capacity(carrier, params);
  if (bit_count > available)
    throw Error(ErrorCode::CarrierTooSmall, std::to_string(bit_count) + " bits requested; carrier holds " +
                                                std::to_string(available) + " blocks");
  std::vector<DetectionStatistic> out;
  if (bit_count == 0) return out;
  const KeyPattern pattern = derive_pattern(key, params.block_len());
  out.reserve(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) out.push_back(statistic(read_block(carrier, params, i), pattern));
  return out;
}

std::vector<std::uint8_t> extract_message(const Carrier& carrier, ByteView key, std::size_t bit_count,
                                          const StatParams& params) {
  std::vector<std::uint8_t> bits;
  for (const auto& st : block_statistics(carrier, key, bit_count, params))
    bits.push_back(static_cast<std::uint8_t>(detect_bit(st, params)));
  return bits;
}

}  // namespace pestego::stat
