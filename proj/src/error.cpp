#include "bandana/error.hpp"

namespace bandana {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::UnstableFilter: return "UnstableFilter";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::TooFewMaxima: return "TooFewMaxima";
    case ErrorCode::NoPeriodicity: return "NoPeriodicity";
    case ErrorCode::CycleTooShort: return "CycleTooShort";
    case ErrorCode::TooFewCycles: return "TooFewCycles";
    case ErrorCode::IndivisibleSegments: return "IndivisibleSegments";
    case ErrorCode::CutoffTooLarge: return "CutoffTooLarge";
    case ErrorCode::DecodeFailure: return "DecodeFailure";
    case ErrorCode::NoSuitableCode: return "NoSuitableCode";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::PakeFailure: return "PakeFailure";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::ConfirmMismatch: return "ConfirmMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::TransportClosed: return "TransportClosed";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
    case ErrorCode::MissingColumns: return "MissingColumns";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::InsufficientBits: return "InsufficientBits";
    case ErrorCode::MissingPosition: return "MissingPosition";
    case ErrorCode::TooFewKeys: return "TooFewKeys";
  }
  return "Unknown";
}

}  // namespace bandana
