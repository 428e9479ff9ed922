#include "pe_fixture.hpp"

#include <algorithm>
#include <cstring>

namespace pestego::testing {
namespace {

void put16(Bytes& b, std::size_t off, std::uint16_t v) {
  b[off] = v & 0xFF;
  b[off + 1] = v >> 8;
}

void put32(Bytes& b, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[off + i] = (v >> (8 * i)) & 0xFF;
}

constexpr char kStub[] = "This program cannot be run in DOS mode.\r\r\n$";

}  // namespace

std::uint32_t Fixture::slack_length() const {
  const std::uint32_t limit = std::min(size_of_headers, first_raw);
  return limit > header_end ? limit - header_end : 0;
}

Fixture make_fixture(const FixtureSpec& spec) {
  Fixture fx;
  const auto n = static_cast<std::uint32_t>(spec.sections.size());
  const std::uint32_t opt = spec.e_lfanew + 4 + 20;
  fx.header_end = opt + spec.size_of_optional_header + 40 * n;
  fx.size_of_headers = spec.size_of_headers.value_or(align_up(fx.header_end, spec.file_alignment));

  std::uint32_t next_ptr = fx.size_of_headers;
  std::uint32_t next_va = spec.section_alignment;
  std::uint64_t file_end = fx.size_of_headers;
  fx.first_raw = 0xFFFFFFFFu;
  for (const auto& s : spec.sections) {
    SectionLayout l{};
    l.virtual_size = s.virtual_size;
    l.raw_size = s.raw_size;
    l.pointer = s.pointer.value_or(next_ptr);
    l.virtual_address = next_va;
    next_ptr = l.pointer + l.raw_size;
    next_va = align_up(next_va + std::max(std::max(s.virtual_size, s.raw_size), 1u), spec.section_alignment);
    if (l.raw_size > 0) fx.first_raw = std::min(fx.first_raw, l.pointer);
    file_end = std::max<std::uint64_t>(file_end, std::uint64_t{l.pointer} + l.raw_size);
    fx.sections.push_back(l);
  }
  file_end += spec.overlay;
  fx.entry_point = fx.sections.empty() ? 0 : fx.sections.front().virtual_address;

  Bytes& b = fx.bytes;
  b.assign(static_cast<std::size_t>(std::max<std::uint64_t>(file_end, fx.header_end)), 0);

  // DOS header and stub.
  b[0] = 'M';
  b[1] = 'Z';
  put16(b, 0x02, 0x90);
  put16(b, 0x04, 3);
  put16(b, 0x08, 4);
  put16(b, 0x0C, 0xFFFF);
  put16(b, 0x10, 0xB8);
  put16(b, 0x18, 0x40);
  put32(b, 0x3C, spec.e_lfanew);
  const std::size_t stub_room = spec.e_lfanew > 0x40 ? spec.e_lfanew - 0x40 : 0;
  std::memcpy(b.data() + 0x40, kStub, std::min(stub_room, sizeof kStub - 1));

  // NT signature and COFF file header.
  const std::size_t nt = spec.e_lfanew;
  b[nt] = 'P';
  b[nt + 1] = 'E';
  put16(b, nt + 4, 0x014C);  // i386
  put16(b, nt + 6, static_cast<std::uint16_t>(n));
  put32(b, nt + 8, 0x5F000000);
  put16(b, nt + 20, spec.size_of_optional_header);
  put16(b, nt + 22, 0x0102);

  // PE32 optional header.
  std::uint32_t size_of_image = spec.section_alignment;
  for (const auto& l : fx.sections)
    size_of_image = std::max(size_of_image, align_up(l.virtual_address + std::max(l.virtual_size, l.raw_size), spec.section_alignment));
  put16(b, opt, spec.optional_magic);
  b[opt + 2] = 14;
  put32(b, opt + 16, fx.entry_point);
  put32(b, opt + 28, spec.image_base);
  put32(b, opt + 32, spec.section_alignment);
  put32(b, opt + 36, spec.file_alignment);
  put16(b, opt + 40, 5);
  put32(b, opt + 56, size_of_image);
  put32(b, opt + 60, fx.size_of_headers);
  put32(b, opt + 64, spec.checksum);
  put16(b, opt + 68, 3);  // console
  put32(b, opt + 72, 0x100000);
  put32(b, opt + 76, 0x1000);
  put32(b, opt + 80, 0x100000);
  put32(b, opt + 84, 0x1000);
  put32(b, opt + 92, 16);

  // Section table.
  const std::size_t table = opt + spec.size_of_optional_header;
  for (std::size_t i = 0; i < fx.sections.size(); ++i) {
    const auto& l = fx.sections[i];
    const std::size_t at = table + 40 * i;
    const auto& name = spec.sections[i].name;
    std::memcpy(b.data() + at, name.data(), std::min<std::size_t>(name.size(), 8));
    put32(b, at + 8, l.virtual_size);
    put32(b, at + 12, l.virtual_address);
    put32(b, at + 16, l.raw_size);
    put32(b, at + 20, l.pointer);
    put32(b, at + 36, 0x60000020);
  }

  if (spec.header_slack_fill) {
    for (std::uint32_t i = 0; i < fx.slack_length(); ++i) b[fx.header_end + i] = *spec.header_slack_fill;
  }

  // Section contents: pseudo-random bytes up to VirtualSize, zero padding after.
  std::mt19937_64 rng(spec.content_seed);
  for (const auto& l : fx.sections) {
    const std::uint32_t used = std::min(l.virtual_size, l.raw_size);
    for (std::uint32_t i = 0; i < used; ++i) {
      const std::size_t at = std::size_t{l.pointer} + i;
      if (at < b.size()) b[at] = static_cast<std::uint8_t>(rng() | 1);
    }
  }
  std::mt19937_64 tail(spec.content_seed ^ 0xABCDEF);
  for (std::uint64_t i = file_end - spec.overlay; i < file_end; ++i) b[i] = static_cast<std::uint8_t>(tail());
  return fx;
}

FixtureSpec random_spec(std::mt19937_64& rng, std::uint32_t file_alignment, int max_sections) {
  FixtureSpec spec;
  spec.file_alignment = file_alignment;
  spec.section_alignment = std::max<std::uint32_t>(0x1000, file_alignment);
  spec.content_seed = rng();
  const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_sections));
  // e_lfanew in [0x40, 0x100], 8-aligned, keeps the section table inside
  // one alignment unit for realistic header slack.
  spec.e_lfanew = 0x40 + 8 * static_cast<std::uint32_t>(rng() % 0x1D);
  static const char* names[] = {".text", ".rdata", ".data", ".rsrc", ".reloc", ".idata", ".tls", ".bss"};
  spec.sections.clear();
  for (int i = 0; i < n; ++i) {
    SectionSpec s;
    s.name = names[i % 8];
    s.virtual_size = 1 + static_cast<std::uint32_t>(rng() % (3 * file_alignment));
    s.raw_size = align_up(s.virtual_size, file_alignment);
    if (rng() % 5 == 0) s.virtual_size = s.raw_size + static_cast<std::uint32_t>(rng() % 0x400);  // bss-like tail
    spec.sections.push_back(s);
  }
  if (rng() % 3 == 0) spec.overlay = static_cast<std::uint32_t>(rng() % 300);
  return spec;
}

}  // namespace pestego::testing
