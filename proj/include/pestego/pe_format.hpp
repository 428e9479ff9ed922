#pragma once

// Structural model of 32-bit Portable Executable files.
//
// A PeImage keeps the complete original byte sequence next to the decoded
// headers, so serialization is always the identity on untouched files. Only
// the DOS header, the COFF file header, the fixed part of the PE32 optional
// header and the section table are decoded; everything else (data
// directories, section contents, overlays) stays opaque.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pestego/bytes.hpp"

namespace pestego {

inline constexpr std::uint16_t kPe32Magic = 0x10B;
inline constexpr std::size_t kDosHeaderSize = 0x40;
inline constexpr std::size_t kFileHeaderSize = 20;
inline constexpr std::size_t kSectionHeaderSize = 40;
// Bytes of the PE32 optional header up to and including NumberOfRvaAndSizes.
inline constexpr std::size_t kPe32OptionalFixedSize = 96;

/// Half-open span of file offsets [offset, offset + length).
struct Region {
  std::uint32_t offset = 0;
  std::uint32_t length = 0;

  std::uint64_t end() const { return std::uint64_t{offset} + length; }
  bool empty() const { return length == 0; }
  bool contains(std::uint64_t pos) const { return pos >= offset && pos < end(); }
  bool contains(const Region& other) const {
    return other.empty() || (other.offset >= offset && other.end() <= end());
  }
  bool overlaps(const Region& other) const {
    return !empty() && !other.empty() && offset < other.end() && other.offset < end();
  }
  bool operator==(const Region&) const = default;
};

struct DosHeader {
  std::array<std::uint8_t, 2> magic{};
  std::uint32_t e_lfanew = 0;

  bool operator==(const DosHeader&) const = default;
};

struct NtHeaders {
  std::uint32_t offset = 0;  // file offset of the "PE\0\0" tag
  std::uint16_t machine = 0;
  std::uint16_t number_of_sections = 0;
  std::uint32_t time_date_stamp = 0;
  std::uint16_t size_of_optional_header = 0;
  std::uint16_t characteristics = 0;
  std::uint16_t optional_magic = 0;
  std::uint32_t address_of_entry_point = 0;
  std::uint32_t image_base = 0;
  std::uint32_t section_alignment = 0;
  std::uint32_t file_alignment = 0;
  std::uint32_t size_of_image = 0;
  std::uint32_t size_of_headers = 0;
  std::uint32_t checksum = 0;
  std::uint16_t subsystem = 0;

  bool operator==(const NtHeaders&) const = default;
};

struct SectionHeader {
  std::array<std::uint8_t, 8> name{};  // verbatim, not necessarily NUL-terminated
  std::uint32_t virtual_size = 0;
  std::uint32_t virtual_address = 0;
  std::uint32_t size_of_raw_data = 0;
  std::uint32_t pointer_to_raw_data = 0;
  std::uint32_t characteristics = 0;

  /// Printable rendering of the name; non-printable bytes become '.'.
  std::string display_name() const;
  /// Raw data span in the file (may extend past EOF on truncated files).
  std::uint64_t raw_end() const { return std::uint64_t{pointer_to_raw_data} + size_of_raw_data; }

  bool operator==(const SectionHeader&) const = default;
};

enum class Severity { Warning, Error };

/// A structural finding. `code` is a stable identifier such as
/// "RawPointerMisaligned"; `message` is for humans.
struct Issue {
  Severity severity = Severity::Warning;
  std::string code;
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ParseOptions {
  /// Promote layout warnings to a StrictViolation error.
  bool strict = false;
};

class PeImage {
 public:
  /// Throws Error with NotMz, NotPe, Truncated, Not32Bit or StrictViolation.
  static PeImage parse(ByteView bytes, ParseOptions options = {});

  const Bytes& bytes() const { return raw_; }
  std::size_t size() const { return raw_.size(); }
  const DosHeader& dos_header() const { return dos_; }
  const NtHeaders& nt_headers() const { return nt_; }
  const std::vector<SectionHeader>& sections() const { return sections_; }
  std::uint32_t header_end_offset() const { return header_end_; }
  std::uint32_t size_of_headers() const { return nt_.size_of_headers; }
  std::uint32_t optional_header_offset() const { return nt_.offset + 4 + kFileHeaderSize; }
  /// The section table: [header_end - 40 * sections, header_end).
  Region section_table_region() const;
  /// Layout warnings collected during parsing (empty for well-formed files).
  const std::vector<Issue>& warnings() const { return warnings_; }

  /// Overwrites bytes in place; the file length never changes. Edits that
  /// touch the decoded header range are re-decoded, and rejected (leaving
  /// the image untouched) if the result no longer parses.
  void write(std::uint32_t offset, ByteView data);

  Bytes serialize() const { return raw_; }

  bool operator==(const PeImage& other) const {
    return raw_ == other.raw_ && dos_ == other.dos_ && nt_ == other.nt_ &&
           sections_ == other.sections_ && header_end_ == other.header_end_;
  }

 private:
  PeImage() = default;

  Bytes raw_;
  DosHeader dos_;
  NtHeaders nt_;
  std::vector<SectionHeader> sections_;
  std::uint32_t header_end_ = 0;
  std::vector<Issue> warnings_;
  ParseOptions options_;
};

inline PeImage parse_pe(ByteView bytes, ParseOptions options = {}) {
  return PeImage::parse(bytes, options);
}

inline Bytes serialize(const PeImage& image) { return image.serialize(); }

/// image_base + rva; throws Overflow past the 32-bit address space.
std::uint32_t rva_to_va(std::uint32_t image_base, std::uint32_t rva);

/// Maps an RVA to a file offset through the section table. RVAs below the
/// first section and inside SizeOfHeaders map to themselves.
std::uint32_t rva_to_file_offset(const PeImage& image, std::uint32_t rva);

/// Inverse of rva_to_file_offset for offsets inside a section's raw data or
/// the header range.
std::uint32_t file_offset_to_rva(const PeImage& image, std::uint32_t offset);

/// Unused bytes between the end of the section table and the first section's
/// raw data (bounded by SizeOfHeaders). May be empty.
Region header_slack(const PeImage& image);

/// Raw bytes of a section beyond its VirtualSize; empty when the section is
/// not padded.
Region section_slack(const PeImage& image, std::size_t index);

/// Layout checks on an already decoded image (alignment, overlap, truncation).
std::vector<Issue> layout_issues(const PeImage& image);

}  // namespace pestego
