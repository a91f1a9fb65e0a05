#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bandana/bits.hpp"
#include "bandana/fingerprint.hpp"

namespace bandana::ecc {

/// Narrow-sense primitive binary BCH code of length n = 2^m - 1.
struct CodeParams {
  unsigned m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t t = 0;     // BCH-bound correction radius
  BitVector generator;   // coefficients of x^0 .. x^(n-k)
};

struct FuzzyKey {
  BitVector key_bits;  // k bits
  CodeParams params;
  // Hamming distance between the input and the chosen codeword. Bounded
  // decoding keeps this <= t; nearest-codeword decoding may exceed it.
  std::size_t corrected_errors = 0;
};

/// All distinct BCH codes of length 2^m - 1, in increasing t.
std::vector<CodeParams> bch_table(unsigned m);

/// Largest standard length n <= N; smallest tabulated t with t/n >= error_rate
/// (so the largest k meeting the rate), else the strongest code available.
CodeParams choose_params(std::size_t N, double error_rate);

class BchCode {
 public:
  explicit BchCode(const CodeParams& params);
  static BchCode with_designed_t(unsigned m, std::size_t designed_t);

  const CodeParams& params() const noexcept;

  /// Systematic: parity in positions 0..n-k-1, message in n-k..n-1.
  BitVector encode(std::span<const std::uint8_t> message) const;
  BitVector message_of(std::span<const std::uint8_t> codeword) const;

  /// Syndrome + Berlekamp-Massey + Chien search. Throws DecodeFailure when no
  /// codeword lies within distance t.
  FuzzyKey decode(std::span<const std::uint8_t> received) const;

  /// Complete minimum-distance decoding: bounded decoding first, exhaustive
  /// codebook search otherwise (ties go to the smallest message value).
  /// Requires k <= kMaxExhaustiveK; otherwise behaves like decode().
  FuzzyKey decode_nearest(std::span<const std::uint8_t> received) const;

  static constexpr std::size_t kMaxExhaustiveK = 20;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// The reduced fingerprint length must equal the code length n.
FuzzyKey decode(const fingerprint::ReducedFingerprint& fp, const BchCode& code);

/// Key bits packed most-significant-bit first, tail zero-padded.
Bytes serialize_key(const FuzzyKey& key);

}  // namespace bandana::ecc
