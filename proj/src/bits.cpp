#include "bandana/bits.hpp"

#include "bandana/error.hpp"

namespace bandana {

Bytes pack_bits(std::span<const std::uint8_t> bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1u) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

BitVector unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) {
    throw Error(ErrorCode::LengthMismatch, "not enough bytes for requested bit count");
  }
  BitVector out(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return out;
}

std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "bit vectors differ in length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] & 1u) != (b[i] & 1u);
  return d;
}

}  // namespace bandana
