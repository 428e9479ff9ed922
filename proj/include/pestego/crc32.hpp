#pragma once

#include <cstdint>

#include "pestego/bytes.hpp"

namespace pestego {

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320). Chain calls by
/// passing the previous result as `crc`.
std::uint32_t crc32(ByteView data, std::uint32_t crc = 0);

}  // namespace pestego
