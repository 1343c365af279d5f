#include "selenc/error.hpp"

namespace selenc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoStartCode: return "NoStartCode";
    case ErrorCode::EscapingViolation: return "EscapingViolation";
    case ErrorCode::MalformedEscape: return "MalformedEscape";
    case ErrorCode::OutOfBits: return "OutOfBits";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadKeyLength: return "BadKeyLength";
    case ErrorCode::CounterOverflow: return "CounterOverflow";
    case ErrorCode::WrongKey: return "WrongKey";
    case ErrorCode::OrdinalOutOfRange: return "OrdinalOutOfRange";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::BadHex: return "BadHex";
    case ErrorCode::EmptyPassphrase: return "EmptyPassphrase";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace selenc
