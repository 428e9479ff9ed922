#include "pestego/error.hpp"

namespace pestego {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotMz: return "NotMz";
    case ErrorCode::NotPe: return "NotPe";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Not32Bit: return "Not32Bit";
    case ErrorCode::StrictViolation: return "StrictViolation";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::UnmappedRva: return "UnmappedRva";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NameTooLong: return "NameTooLong";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::InsufficientSlack: return "InsufficientSlack";
    case ErrorCode::SlackOccupied: return "SlackOccupied";
    case ErrorCode::NoPayload: return "NoPayload";
    case ErrorCode::CorruptPayload: return "CorruptPayload";
    case ErrorCode::UnsafeName: return "UnsafeName";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::OddBlockLength: return "OddBlockLength";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BlockTooSmall: return "BlockTooSmall";
    case ErrorCode::CarrierTooSmall: return "CarrierTooSmall";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::BadCarrier: return "BadCarrier";
    case ErrorCode::ParseFailure: return "ParseFailure";
  }
  return "Unknown";
}

}  // namespace pestego
