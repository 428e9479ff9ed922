#pragma once

// Hiding named payloads in the header slack of a PE image.
//
// Record layout (all integers little-endian):
//
//   offset  size      field
//   0       4         magic "SPE1"
//   4       2         name_len (1..255)
//   6       name_len  name (UTF-8)
//   ..      4         data_len
//   ..      data_len  data
//   ..      4         CRC-32 (IEEE) of name ++ data
//
// The record is written at the first byte after the section table. The
// payload is not encrypted; anyone who knows this layout can read it back.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pestego/bytes.hpp"
#include "pestego/pe_format.hpp"

namespace pestego {

inline constexpr std::array<std::uint8_t, 4> kRecordMagic{'S', 'P', 'E', '1'};
inline constexpr std::uint32_t kRecordFixedOverhead = 4 + 2 + 4 + 4;
inline constexpr std::size_t kMaxNameLength = 255;

struct PayloadRecord {
  std::string name;
  Bytes data;

  std::uint32_t checksum() const;
  std::size_t encoded_size() const { return kRecordFixedOverhead + name.size() + data.size(); }
  Bytes encode() const;

  /// Decodes a record from the start of `region`. Throws NoPayload when the
  /// magic is absent and CorruptPayload on inconsistent lengths or a CRC
  /// mismatch.
  static PayloadRecord decode(ByteView region);

  bool operator==(const PayloadRecord&) const = default;
};

/// Throws NameTooLong (> 255 bytes) or InvalidName (empty, bad UTF-8).
void validate_payload_name(std::string_view name);

struct CapacityReport {
  Region region;
  std::uint32_t total = 0;
  std::uint32_t overhead = 0;
  std::uint32_t usable = 0;
};

CapacityReport capacity(const PeImage& image, std::string_view name);

struct HideOptions {
  /// Allow overwriting non-zero slack bytes, including an earlier record.
  bool force = false;
};

/// Returns a copy of `image` with the record written into its header slack.
/// Throws NameTooLong, InvalidName, InsufficientSlack or SlackOccupied.
PeImage hide(const PeImage& image, std::string_view name, ByteView data, HideOptions options = {});

/// Reads back the record written by hide().
PayloadRecord retract(const PeImage& image);

/// Writes `data` to out_dir/name, creating out_dir if needed. Names that
/// would escape out_dir are rejected with UnsafeName.
std::filesystem::path write_extracted_file(std::string_view name, ByteView data,
                                           const std::filesystem::path& out_dir);

}  // namespace pestego
