#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pestego {

enum class ErrorCode {
  // PE parsing and address arithmetic
  NotMz,
  NotPe,
  Truncated,
  Not32Bit,
  StrictViolation,
  Overflow,
  UnmappedRva,
  IndexOutOfRange,
  OutOfBounds,
  // payload hiding
  NameTooLong,
  InvalidName,
  InsufficientSlack,
  SlackOccupied,
  NoPayload,
  CorruptPayload,
  UnsafeName,
  IoFailure,
  // statistical embedding
  OddBlockLength,
  LengthMismatch,
  BlockTooSmall,
  CarrierTooSmall,
  InvalidParams,
  BadCarrier,
  // integrity
  ParseFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pestego
