#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pestego::cli {

/// Process exit codes. Stable; scripts depend on them.
enum Exit : int {
  kOk = 0,
  kUsage = 1,            // bad flags, invalid names or parameters
  kBadInput = 2,         // unreadable or unparseable input file
  kInsufficientSlack = 3,
  kSlackOccupied = 4,
  kNoPayload = 5,
  kCorruptPayload = 6,
  kCarrierTooSmall = 7,
  kNotConfined = 8,      // verify: changes reach outside the header slack
  kIoFailure = 9,        // could not write an output
};

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pestego::cli
