#pragma once

// Structural comparison of a cover file and its stego counterpart.

#include <cstdint>
#include <string>
#include <vector>

#include "pestego/bytes.hpp"
#include "pestego/pe_format.hpp"

namespace pestego {

struct EquivalenceReport {
  std::uint64_t length_before = 0;
  std::uint64_t length_after = 0;
  /// Bytes [0, header_end_offset) are equal on both sides.
  bool identical_headers = false;
  bool identical_section_table = false;
  /// Header slack of the `before` image.
  Region slack;
  /// Maximal runs of differing bytes, ascending. A length mismatch shows up
  /// as a run covering the tail of the longer file.
  std::vector<Region> diff_regions;
  bool diff_confined_to_slack = false;
  std::vector<std::string> notes;
};

/// Throws ParseFailure when either side is not an acceptable PE file.
EquivalenceReport compare(ByteView before, ByteView after);

/// Line-oriented summary for humans.
std::string to_text(const EquivalenceReport& report);

/// Key/value document with a fixed field order, one entry per line:
///
///   format: pestego-integrity/1
///   length_before: <n>
///   length_after: <n>
///   identical_headers: true|false
///   identical_section_table: true|false
///   slack: <hex offset> <length>
///   diff_confined_to_slack: true|false
///   diff_region_count: <n>
///   diff_region: <hex offset> <length>     (repeated)
///   note_count: <n>
///   note: <text>                           (repeated)
std::string to_structured(const EquivalenceReport& report);

/// Parse errors and layout warnings for `bytes`; empty means clean. A parse
/// failure yields a single Error-severity entry named after the error code.
std::vector<Issue> validate_pe(ByteView bytes);

}  // namespace pestego
