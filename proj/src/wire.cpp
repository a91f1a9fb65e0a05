#include "bandana/wire.hpp"

#include <algorithm>

#include "bandana/error.hpp"
#include "bandana/fingerprint.hpp"

namespace bandana::wire {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedMessage, what); }

constexpr std::uint8_t kNoncePadMask = 0xFC;  // 96 - 90 = 6 leading pad bits

}  // namespace

MessageType type_of(const Message& msg) noexcept {
  return static_cast<MessageType>(msg.index() + 1);
}

bool valid_nonce(const Nonce& n) noexcept { return (n[0] & kNoncePadMask) == 0; }

Bytes encode(const Message& msg) {
  Bytes payload;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ReliabilityExchange>) {
          if (m.order.empty() || m.order.size() > kMaxOrderLength) {
            throw Error(ErrorCode::InvalidArgument, "order length must be in 1..256");
          }
          if (!valid_nonce(m.nonce)) throw Error(ErrorCode::InvalidArgument, "nonce exceeds 90 bits");
          const auto M = m.order.size();
          payload.push_back(static_cast<std::uint8_t>(M >> 8));
          payload.push_back(static_cast<std::uint8_t>(M & 0xFF));
          for (auto idx : m.order) {
            if (idx >= M) throw Error(ErrorCode::InvalidArgument, "order index out of range");
            payload.push_back(static_cast<std::uint8_t>(idx));
          }
          payload.insert(payload.end(), m.nonce.begin(), m.nonce.end());
        } else if constexpr (std::is_same_v<T, PakeMsg>) {
          payload = m.payload;
        } else if constexpr (std::is_same_v<T, Confirm>) {
          payload.assign(m.mac.begin(), m.mac.end());
        } else if constexpr (std::is_same_v<T, Abort>) {
          payload.assign(m.reason.begin(), m.reason.end());
        }
      },
      msg);
  if (payload.size() > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "payload exceeds 65535 bytes");
  Bytes frame;
  frame.reserve(kHeaderSize + payload.size());
  frame.push_back(kVersion);
  frame.push_back(static_cast<std::uint8_t>(type_of(msg)));
  frame.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
  frame.push_back(static_cast<std::uint8_t>(payload.size() & 0xFF));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

std::size_t payload_length(std::span<const std::uint8_t> header) {
  if (header.size() < kHeaderSize) malformed("truncated header");
  if (header[0] != kVersion) malformed("unsupported version");
  if (header[1] < 0x01 || header[1] > 0x05) malformed("unknown message type");
  return (static_cast<std::size_t>(header[2]) << 8) | header[3];
}

Message decode(std::span<const std::uint8_t> frame) {
  const std::size_t len = payload_length(frame);
  if (frame.size() != kHeaderSize + len) malformed("frame length does not match header");
  const auto payload = frame.subspan(kHeaderSize);
  switch (static_cast<MessageType>(frame[1])) {
    case MessageType::AuthRequest:
      if (!payload.empty()) malformed("AuthRequest carries no payload");
      return AuthRequest{};
    case MessageType::ReliabilityExchange: {
      if (payload.size() < 2) malformed("ReliabilityExchange too short");
      const std::size_t M = (static_cast<std::size_t>(payload[0]) << 8) | payload[1];
      if (M == 0 || M > kMaxOrderLength) malformed("order length out of range");
      if (payload.size() != 2 + M + kNonceBytes) malformed("ReliabilityExchange length mismatch");
      ReliabilityExchange re;
      re.order.assign(payload.begin() + 2, payload.begin() + 2 + static_cast<std::ptrdiff_t>(M));
      std::vector<std::size_t> idx(re.order.begin(), re.order.end());
      if (!fingerprint::is_permutation_of(idx, M)) malformed("order is not a permutation");
      std::copy(payload.begin() + 2 + static_cast<std::ptrdiff_t>(M), payload.end(), re.nonce.begin());
      if (!valid_nonce(re.nonce)) malformed("nonce padding bits set");
      return re;
    }
    case MessageType::PakeMsg:
      return PakeMsg{Bytes(payload.begin(), payload.end())};
    case MessageType::Confirm: {
      if (payload.size() != 32) malformed("Confirm must carry 32 bytes");
      Confirm c;
      std::copy(payload.begin(), payload.end(), c.mac.begin());
      return c;
    }
    case MessageType::Abort:
      return Abort{std::string(payload.begin(), payload.end())};
  }
  malformed("unknown message type");
}

}  // namespace bandana::wire
