#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bandana/bits.hpp"

namespace bandana::wire {

inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 4;
inline constexpr std::size_t kNonceBytes = 12;  // 90 significant bits, zero-padded
inline constexpr std::size_t kNonceBits = 90;
inline constexpr std::size_t kMaxOrderLength = 256;

enum class MessageType : std::uint8_t {
  AuthRequest = 0x01,
  ReliabilityExchange = 0x02,
  PakeMsg = 0x03,
  Confirm = 0x04,
  Abort = 0x05,
};

/// Big-endian 90-bit value in 12 bytes; the top 6 bits are always zero.
using Nonce = std::array<std::uint8_t, kNonceBytes>;

struct AuthRequest {};
struct ReliabilityExchange {
  std::vector<std::uint16_t> order;  // permutation of 0..M-1
  Nonce nonce{};
};
struct PakeMsg {
  Bytes payload;
};
struct Confirm {
  std::array<std::uint8_t, 32> mac{};
};
struct Abort {
  std::string reason;
};

using Message = std::variant<AuthRequest, ReliabilityExchange, PakeMsg, Confirm, Abort>;

MessageType type_of(const Message& msg) noexcept;

/// [version][type][length, 2 bytes BE][payload]
Bytes encode(const Message& msg);

/// Throws MalformedMessage on any framing or payload violation.
Message decode(std::span<const std::uint8_t> frame);

/// Payload length declared by a 4-byte header (validates version and type).
std::size_t payload_length(std::span<const std::uint8_t> header);

bool valid_nonce(const Nonce& n) noexcept;

}  // namespace bandana::wire
