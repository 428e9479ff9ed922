#include "pestego/pe_format.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <limits>

#include "pestego/error.hpp"

namespace pestego {
namespace {

std::string hex32(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Offsets inside IMAGE_OPTIONAL_HEADER32.
constexpr std::size_t kOptEntryPoint = 16;
constexpr std::size_t kOptImageBase = 28;
constexpr std::size_t kOptSectionAlignment = 32;
constexpr std::size_t kOptFileAlignment = 36;
constexpr std::size_t kOptSizeOfImage = 56;
constexpr std::size_t kOptSizeOfHeaders = 60;
constexpr std::size_t kOptCheckSum = 64;
constexpr std::size_t kOptSubsystem = 68;

}  // namespace

std::string SectionHeader::display_name() const {
  std::string out;
  for (auto c : name) {
    if (c == 0) break;
    out.push_back(c >= 0x20 && c < 0x7F ? static_cast<char>(c) : '.');
  }
  return out;
}

Region PeImage::section_table_region() const {
  const auto table = static_cast<std::uint32_t>(kSectionHeaderSize * sections_.size());
  return Region{header_end_ - table, table};
}

PeImage PeImage::parse(ByteView bytes, ParseOptions options) {
  if (bytes.size() < 2 || bytes[0] != 'M' || bytes[1] != 'Z')
    fail(ErrorCode::NotMz, "missing MZ signature");
  if (bytes.size() < kDosHeaderSize)
    fail(ErrorCode::Truncated, "DOS header extends past end of file");

  PeImage img;
  img.options_ = options;
  img.dos_.magic = {bytes[0], bytes[1]};
  img.dos_.e_lfanew = load_le32(bytes, 0x3C);

  const std::uint64_t nt = img.dos_.e_lfanew;
  if (nt + 4 + kFileHeaderSize > bytes.size())
    fail(ErrorCode::Truncated, "e_lfanew " + hex32(nt) + " points past the NT headers' room in the file");
  if (bytes[nt] != 'P' || bytes[nt + 1] != 'E' || bytes[nt + 2] != 0 || bytes[nt + 3] != 0)
    fail(ErrorCode::NotPe, "missing PE\\0\\0 signature at " + hex32(nt));

  auto& h = img.nt_;
  h.offset = static_cast<std::uint32_t>(nt);
  const std::size_t fh = nt + 4;
  h.machine = load_le16(bytes, fh);
  h.number_of_sections = load_le16(bytes, fh + 2);
  h.time_date_stamp = load_le32(bytes, fh + 4);
  h.size_of_optional_header = load_le16(bytes, fh + 16);
  h.characteristics = load_le16(bytes, fh + 18);

  const std::size_t opt = fh + kFileHeaderSize;
  if (opt + 2 > bytes.size()) fail(ErrorCode::Truncated, "optional header extends past end of file");
  h.optional_magic = load_le16(bytes, opt);
  if (h.optional_magic != kPe32Magic)
    fail(ErrorCode::Not32Bit, "optional header magic " + hex32(h.optional_magic) + " is not PE32 (0x10B)");
  if (h.size_of_optional_header < kPe32OptionalFixedSize)
    fail(ErrorCode::Truncated, "SizeOfOptionalHeader " + std::to_string(h.size_of_optional_header) +
                                   " is smaller than the PE32 fixed fields");
  if (opt + h.size_of_optional_header > bytes.size())
    fail(ErrorCode::Truncated, "optional header extends past end of file");

  h.address_of_entry_point = load_le32(bytes, opt + kOptEntryPoint);
  h.image_base = load_le32(bytes, opt + kOptImageBase);
  h.section_alignment = load_le32(bytes, opt + kOptSectionAlignment);
  h.file_alignment = load_le32(bytes, opt + kOptFileAlignment);
  h.size_of_image = load_le32(bytes, opt + kOptSizeOfImage);
  h.size_of_headers = load_le32(bytes, opt + kOptSizeOfHeaders);
  h.checksum = load_le32(bytes, opt + kOptCheckSum);
  h.subsystem = load_le16(bytes, opt + kOptSubsystem);

  const std::uint64_t table = opt + h.size_of_optional_header;
  const std::uint64_t table_end = table + kSectionHeaderSize * h.number_of_sections;
  if (table_end > bytes.size()) fail(ErrorCode::Truncated, "section table extends past end of file");
  img.header_end_ = static_cast<std::uint32_t>(table_end);

  img.sections_.reserve(h.number_of_sections);
  for (std::size_t i = 0; i < h.number_of_sections; ++i) {
    const std::size_t at = table + i * kSectionHeaderSize;
    SectionHeader s;
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(at), 8, s.name.begin());
    s.virtual_size = load_le32(bytes, at + 8);
    s.virtual_address = load_le32(bytes, at + 12);
    s.size_of_raw_data = load_le32(bytes, at + 16);
    s.pointer_to_raw_data = load_le32(bytes, at + 20);
    s.characteristics = load_le32(bytes, at + 36);
    img.sections_.push_back(s);
  }

  img.raw_.assign(bytes.begin(), bytes.end());
  img.warnings_ = layout_issues(img);
  if (options.strict && !img.warnings_.empty())
    fail(ErrorCode::StrictViolation, img.warnings_.front().code + ": " + img.warnings_.front().message);
  return img;
}

void PeImage::write(std::uint32_t offset, ByteView data) {
  if (std::uint64_t{offset} + data.size() > raw_.size())
    fail(ErrorCode::OutOfBounds, "edit at " + hex32(offset) + " of " + std::to_string(data.size()) +
                                     " bytes exceeds file size " + std::to_string(raw_.size()));
  if (data.empty()) return;
  if (offset < header_end_) {
    Bytes edited = raw_;
    std::copy(data.begin(), data.end(), edited.begin() + offset);
    *this = parse(edited, options_);
    return;
  }
  std::copy(data.begin(), data.end(), raw_.begin() + offset);
}

std::vector<Issue> layout_issues(const PeImage& image) {
  std::vector<Issue> out;
  auto warn = [&](std::string code, std::string msg) {
    out.push_back(Issue{Severity::Warning, std::move(code), std::move(msg)});
  };
  const auto& h = image.nt_headers();
  const auto& secs = image.sections();
  const std::uint32_t fa = h.file_alignment;
  const bool fa_ok = fa >= 512 && std::has_single_bit(fa);

  if (!fa_ok) warn("FileAlignment", "FileAlignment " + hex32(fa) + " is not a power of two >= 512");
  if (secs.empty()) warn("NoSections", "file declares zero sections");
  if (h.size_of_headers < image.header_end_offset())
    warn("SizeOfHeaders", "SizeOfHeaders " + hex32(h.size_of_headers) +
                              " is smaller than the end of the section table " +
                              hex32(image.header_end_offset()));

  for (std::size_t i = 0; i < secs.size(); ++i) {
    const auto& s = secs[i];
    const std::string label = "section " + std::to_string(i) + " (" + s.display_name() + ")";
    if (fa != 0 && s.pointer_to_raw_data % fa != 0)
      warn("RawPointerMisaligned", label + " PointerToRawData " + hex32(s.pointer_to_raw_data) +
                                       " is not a multiple of FileAlignment");
    if (fa != 0 && s.size_of_raw_data % fa != 0)
      warn("RawSizeMisaligned", label + " SizeOfRawData " + hex32(s.size_of_raw_data) +
                                    " is not a multiple of FileAlignment");
    if (s.size_of_raw_data > 0 && s.raw_end() > image.size())
      warn("SectionTruncated", label + " raw data ends at " + hex32(s.raw_end()) +
                                   " past end of file " + hex32(image.size()));
    if (s.size_of_raw_data > 0 && s.pointer_to_raw_data < image.header_end_offset())
      warn("SectionOverlapsHeaders", label + " raw data starts inside the headers");
  }

  for (std::size_t i = 0; i < secs.size(); ++i) {
    for (std::size_t j = i + 1; j < secs.size(); ++j) {
      const auto& a = secs[i];
      const auto& b = secs[j];
      if (a.size_of_raw_data == 0 || b.size_of_raw_data == 0) continue;
      if (a.pointer_to_raw_data < b.raw_end() && b.pointer_to_raw_data < a.raw_end())
        warn("SectionOverlap", "raw data of sections " + std::to_string(i) + " and " +
                                   std::to_string(j) + " overlap");
    }
  }
  return out;
}

std::uint32_t rva_to_va(std::uint32_t image_base, std::uint32_t rva) {
  const std::uint64_t va = std::uint64_t{image_base} + rva;
  if (va > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::Overflow, hex32(image_base) + " + " + hex32(rva) + " overflows 32 bits");
  return static_cast<std::uint32_t>(va);
}

std::uint32_t rva_to_file_offset(const PeImage& image, std::uint32_t rva) {
  for (const auto& s : image.sections()) {
    const std::uint64_t span = std::max(s.virtual_size, s.size_of_raw_data);
    if (rva >= s.virtual_address && rva < s.virtual_address + span) {
      const std::uint64_t off = std::uint64_t{s.pointer_to_raw_data} + (rva - s.virtual_address);
      if (off > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorCode::Overflow, "file offset for rva " + hex32(rva) + " overflows 32 bits");
      return static_cast<std::uint32_t>(off);
    }
  }
  std::uint64_t first_va = std::numeric_limits<std::uint64_t>::max();
  for (const auto& s : image.sections()) first_va = std::min<std::uint64_t>(first_va, s.virtual_address);
  if (rva < image.size_of_headers() && rva < first_va) return rva;
  fail(ErrorCode::UnmappedRva, "rva " + hex32(rva) + " is not covered by any section or the headers");
}

std::uint32_t file_offset_to_rva(const PeImage& image, std::uint32_t offset) {
  for (const auto& s : image.sections()) {
    if (s.size_of_raw_data > 0 && offset >= s.pointer_to_raw_data && offset < s.raw_end())
      return rva_to_va(s.virtual_address, offset - s.pointer_to_raw_data);
  }
  if (offset < image.size_of_headers()) return offset;
  fail(ErrorCode::UnmappedRva, "file offset " + hex32(offset) + " is not inside mapped data");
}

Region header_slack(const PeImage& image) {
  std::uint64_t limit = image.size_of_headers();
  for (const auto& s : image.sections())
    if (s.size_of_raw_data > 0) limit = std::min<std::uint64_t>(limit, s.pointer_to_raw_data);
  limit = std::min<std::uint64_t>(limit, image.size());
  const std::uint32_t start = image.header_end_offset();
  if (limit <= start) return Region{start, 0};
  return Region{start, static_cast<std::uint32_t>(limit - start)};
}

Region section_slack(const PeImage& image, std::size_t index) {
  const auto& secs = image.sections();
  if (index >= secs.size())
    fail(ErrorCode::IndexOutOfRange,
         "section index " + std::to_string(index) + " >= " + std::to_string(secs.size()));
  const auto& s = secs[index];
  const std::uint64_t file_size = image.size();
  if (s.size_of_raw_data > s.virtual_size) {
    const std::uint64_t begin = std::min<std::uint64_t>(std::uint64_t{s.pointer_to_raw_data} + s.virtual_size, file_size);
    const std::uint64_t end = std::min<std::uint64_t>(s.raw_end(), file_size);
    return Region{static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(end - begin)};
  }
  return Region{static_cast<std::uint32_t>(std::min<std::uint64_t>(s.raw_end(), file_size)), 0};
}

}  // namespace pestego
