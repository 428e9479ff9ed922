#pragma once

#include <cstdint>
#include <filesystem>

#include "pestego/bytes.hpp"
#include "pestego/stat_stego.hpp"

namespace pestego {

/// Binary PGM (P5) with maxval 255. Header comments are accepted on read;
/// write emits "P5\n<w> <h>\n255\n". Throws BadCarrier.
stat::Carrier read_pgm(ByteView bytes);
Bytes write_pgm(const stat::Carrier& carrier);

/// Headerless row-major grid; size must equal width * height exactly.
stat::Carrier read_raw_grid(ByteView bytes, std::uint32_t width, std::uint32_t height);

/// Whole-file helpers; throw IoFailure.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView data);

}  // namespace pestego
