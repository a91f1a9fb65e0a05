#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bandana {

enum class ErrorCode {
  InvalidArgument,
  // signal
  EmptyStream,
  NonFiniteSample,
  LengthMismatch,
  InvalidBand,
  UnstableFilter,
  // gait
  ZeroVariance,
  TooFewMaxima,
  NoPeriodicity,
  CycleTooShort,
  // fingerprint
  TooFewCycles,
  IndivisibleSegments,
  CutoffTooLarge,
  // ecc
  DecodeFailure,
  NoSuitableCode,
  // protocol
  Timeout,
  PakeFailure,
  MalformedMessage,
  ConfirmMismatch,
  InsufficientData,
  TransportClosed,
  // dataset
  SchemaMismatch,
  NonMonotoneTimestamps,
  MissingColumns,
  SignalTooShort,
  IoError,
  // eval
  InsufficientPairs,
  InsufficientBits,
  MissingPosition,
  TooFewKeys,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bandana
