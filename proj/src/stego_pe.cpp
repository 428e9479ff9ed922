#include "pestego/stego_pe.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include "pestego/crc32.hpp"
#include "pestego/error.hpp"

namespace pestego {
namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

ByteView slack_view(const PeImage& image, const Region& r) {
  return ByteView(image.bytes()).subspan(r.offset, r.length);
}

bool starts_with_magic(ByteView v) {
  return v.size() >= kRecordMagic.size() && std::equal(kRecordMagic.begin(), kRecordMagic.end(), v.begin());
}

}  // namespace

void validate_payload_name(std::string_view name) {
  if (name.size() > kMaxNameLength)
    throw Error(ErrorCode::NameTooLong,
                "payload name is " + std::to_string(name.size()) + " bytes; the limit is 255");
  if (name.empty()) throw Error(ErrorCode::InvalidName, "payload name is empty");
  if (!valid_utf8(name)) throw Error(ErrorCode::InvalidName, "payload name is not valid UTF-8");
}

std::uint32_t PayloadRecord::checksum() const {
  return crc32(data, crc32(as_bytes(name)));
}

Bytes PayloadRecord::encode() const {
  validate_payload_name(name);
  Bytes out(encoded_size());
  auto at = std::copy(kRecordMagic.begin(), kRecordMagic.end(), out.begin());
  store_le16(out, 4, static_cast<std::uint16_t>(name.size()));
  at = std::copy(name.begin(), name.end(), at + 2);
  store_le32(out, static_cast<std::size_t>(at - out.begin()), static_cast<std::uint32_t>(data.size()));
  at = std::copy(data.begin(), data.end(), at + 4);
  store_le32(out, static_cast<std::size_t>(at - out.begin()), checksum());
  return out;
}

PayloadRecord PayloadRecord::decode(ByteView region) {
  if (!starts_with_magic(region)) throw Error(ErrorCode::NoPayload, "no SPE1 record in header slack");
  auto corrupt = [](const std::string& why) { return Error(ErrorCode::CorruptPayload, why); };

  if (region.size() < 6) throw corrupt("record header truncated");
  const std::size_t name_len = load_le16(region, 4);
  if (name_len == 0 || name_len > kMaxNameLength) throw corrupt("name length " + std::to_string(name_len) + " out of range");
  const std::size_t data_len_at = 6 + name_len;
  if (data_len_at + 4 > region.size()) throw corrupt("name length exceeds slack");
  const std::uint64_t data_len = load_le32(region, data_len_at);
  const std::uint64_t crc_at = data_len_at + 4 + data_len;
  if (crc_at + 4 > region.size()) throw corrupt("data length " + std::to_string(data_len) + " exceeds slack");

  PayloadRecord rec;
  rec.name.assign(reinterpret_cast<const char*>(region.data()) + 6, name_len);
  const auto data_begin = region.begin() + static_cast<std::ptrdiff_t>(data_len_at + 4);
  rec.data.assign(data_begin, data_begin + static_cast<std::ptrdiff_t>(data_len));
  const std::uint32_t stored = load_le32(region, static_cast<std::size_t>(crc_at));
  if (stored != rec.checksum()) throw corrupt("CRC mismatch");
  if (!valid_utf8(rec.name)) throw corrupt("stored name is not valid UTF-8");
  return rec;
}

CapacityReport capacity(const PeImage& image, std::string_view name) {
  validate_payload_name(name);
  CapacityReport rep;
  rep.region = header_slack(image);
  rep.total = rep.region.length;
  rep.overhead = kRecordFixedOverhead + static_cast<std::uint32_t>(name.size());
  rep.usable = rep.total > rep.overhead ? rep.total - rep.overhead : 0;
  return rep;
}

PeImage hide(const PeImage& image, std::string_view name, ByteView data, HideOptions options) {
  validate_payload_name(name);
  const Region slack = header_slack(image);
  PayloadRecord rec{std::string(name), Bytes(data.begin(), data.end())};
  const std::uint64_t need = rec.encoded_size();
  if (need > slack.length)
    throw Error(ErrorCode::InsufficientSlack, "record needs " + std::to_string(need) + " bytes; header slack has " +
                                                  std::to_string(slack.length));

  const ByteView current = slack_view(image, slack);
  const ByteView target = current.first(static_cast<std::size_t>(need));
  const bool clean = std::all_of(target.begin(), target.end(), [](std::uint8_t b) { return b == 0; });
  const bool has_record = starts_with_magic(current);
  if (!clean && !options.force)
    throw Error(ErrorCode::SlackOccupied, has_record ? "header slack already holds a payload record (use force)"
                                                     : "header slack contains non-zero bytes (use force)");

  Bytes encoded = rec.encode();
  // A longer record being replaced would otherwise leave its tail behind.
  if (has_record) {
    try {
      const auto old = PayloadRecord::decode(current).encoded_size();
      if (old > encoded.size()) encoded.resize(old, 0);
    } catch (const Error&) {
    }
  }

  PeImage out = image;
  out.write(slack.offset, encoded);
  return out;
}

PayloadRecord retract(const PeImage& image) {
  return PayloadRecord::decode(slack_view(image, header_slack(image)));
}

std::filesystem::path write_extracted_file(std::string_view name, ByteView data,
                                           const std::filesystem::path& out_dir) {
  const bool bad_char = std::any_of(name.begin(), name.end(), [](char c) {
    return c == '/' || c == '\\' || c == '\0' || static_cast<unsigned char>(c) < 0x20;
  });
  if (name.empty() || name == "." || name == ".." || bad_char)
    throw Error(ErrorCode::UnsafeName, "refusing to write payload named '" + std::string(name) + "'");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  const auto path = out_dir / std::filesystem::path(std::string(name));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
  return path;
}

}  // namespace pestego
