#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bandana {

/// One bit per element, values 0 or 1.
using BitVector = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

/// Most-significant-bit first, tail zero-padded to a whole byte.
Bytes pack_bits(std::span<const std::uint8_t> bits);
BitVector unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace bandana
