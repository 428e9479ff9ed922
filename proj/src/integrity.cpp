#include "pestego/integrity.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "pestego/error.hpp"

namespace pestego {
namespace {

PeImage parse_side(ByteView bytes, const char* side) {
  try {
    return PeImage::parse(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseFailure,
                std::string(side) + " file: " + std::string(to_string(e.code())) + ": " + e.what());
  }
}

bool equal_range(ByteView a, ByteView b, const Region& r) {
  if (r.end() > a.size() || r.end() > b.size()) return false;
  return std::equal(a.begin() + r.offset, a.begin() + static_cast<std::ptrdiff_t>(r.end()), b.begin() + r.offset);
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%08llX", static_cast<unsigned long long>(v));
  return buf;
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

EquivalenceReport compare(ByteView before, ByteView after) {
  const PeImage a = parse_side(before, "before");
  const PeImage b = parse_side(after, "after");

  EquivalenceReport rep;
  rep.length_before = before.size();
  rep.length_after = after.size();
  rep.slack = header_slack(a);
  rep.identical_headers =
      a.header_end_offset() == b.header_end_offset() && equal_range(before, after, Region{0, a.header_end_offset()});
  rep.identical_section_table = a.section_table_region() == b.section_table_region() &&
                                equal_range(before, after, a.section_table_region());

  const std::size_t common = std::min(before.size(), after.size());
  std::size_t i = 0;
  while (i < common) {
    if (before[i] == after[i]) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < common && before[i] != after[i]) ++i;
    rep.diff_regions.push_back(Region{static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(i - start)});
  }
  const std::size_t longer = std::max(before.size(), after.size());
  if (longer > common) {
    Region tail{static_cast<std::uint32_t>(common), static_cast<std::uint32_t>(longer - common)};
    if (!rep.diff_regions.empty() && rep.diff_regions.back().end() == common)
      rep.diff_regions.back().length += tail.length;
    else
      rep.diff_regions.push_back(tail);
    rep.notes.push_back("file lengths differ: " + std::to_string(before.size()) + " vs " +
                        std::to_string(after.size()));
  }

  rep.diff_confined_to_slack =
      before.size() == after.size() &&
      std::all_of(rep.diff_regions.begin(), rep.diff_regions.end(),
                  [&](const Region& r) { return rep.slack.contains(r); });

  if (a.nt_headers().checksum != 0)
    rep.notes.push_back("optional header CheckSum is nonzero (" + hex(a.nt_headers().checksum) +
                        ") and is not recomputed");
  if (a.nt_headers().checksum != b.nt_headers().checksum) rep.notes.push_back("optional header CheckSum changed");
  return rep;
}

std::string to_text(const EquivalenceReport& r) {
  std::ostringstream out;
  out << "length: " << r.length_before << " -> " << r.length_after << '\n';
  out << "headers identical: " << (r.identical_headers ? "yes" : "no") << '\n';
  out << "section table identical: " << (r.identical_section_table ? "yes" : "no") << '\n';
  out << "header slack: " << hex(r.slack.offset) << " +" << r.slack.length << '\n';
  out << "differing runs: " << r.diff_regions.size() << '\n';
  for (const auto& d : r.diff_regions) out << "  " << hex(d.offset) << " +" << d.length << '\n';
  out << "changes confined to header slack: " << (r.diff_confined_to_slack ? "yes" : "no") << '\n';
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  return out.str();
}

std::string to_structured(const EquivalenceReport& r) {
  std::ostringstream out;
  out << "format: pestego-integrity/1\n";
  out << "length_before: " << r.length_before << '\n';
  out << "length_after: " << r.length_after << '\n';
  out << "identical_headers: " << yes_no(r.identical_headers) << '\n';
  out << "identical_section_table: " << yes_no(r.identical_section_table) << '\n';
  out << "slack: " << hex(r.slack.offset) << ' ' << r.slack.length << '\n';
  out << "diff_confined_to_slack: " << yes_no(r.diff_confined_to_slack) << '\n';
  out << "diff_region_count: " << r.diff_regions.size() << '\n';
  for (const auto& d : r.diff_regions) out << "diff_region: " << hex(d.offset) << ' ' << d.length << '\n';
  out << "note_count: " << r.notes.size() << '\n';
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  return out.str();
}

std::vector<Issue> validate_pe(ByteView bytes) {
  try {
    return PeImage::parse(bytes).warnings();
  } catch (const Error& e) {
    return {Issue{Severity::Error, std::string(to_string(e.code())), e.what()}};
  }
}

}  // namespace pestego
