#include "pestego/key.hpp"

#include <string>

#include "pestego/error.hpp"

namespace pestego {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes parse_key(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    const auto digits = text.substr(2);
    if (digits.empty() || digits.size() % 2 != 0)
      throw Error(ErrorCode::InvalidParams, "hex key needs a non-zero even number of digits");
    Bytes out;
    out.reserve(digits.size() / 2);
    for (std::size_t i = 0; i < digits.size(); i += 2) {
      const int hi = hex_digit(digits[i]);
      const int lo = hex_digit(digits[i + 1]);
      if (hi < 0 || lo < 0) throw Error(ErrorCode::InvalidParams, "invalid hex digit in key '" + std::string(text) + "'");
      out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return out;
  }
  return Bytes(text.begin(), text.end());
}

std::uint64_t key_seed(ByteView key, std::uint64_t block_len) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001B3ull;
  };
  for (auto b : key) mix(b);
  for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(block_len >> (8 * i)));
  return h;
}

}  // namespace pestego
