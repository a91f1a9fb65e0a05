#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandana/crypto.hpp"
#include "bandana/fingerprint.hpp"
#include "bandana/fuzzy_ecc.hpp"
#include "bandana/gait.hpp"
#include "bandana/pake.hpp"
#include "bandana/transport.hpp"
#include "bandana/wire.hpp"

namespace bandana::protocol {

using gait::shift_retry;

enum class Phase { Idle, AwaitExchange, AwaitPake, Established, Failed };

enum class FailureReason {
  None,
  Timeout,
  DecodeFailure,
  PakeFailure,
  MalformedMessage,
  ConfirmMismatch,
  NonceTie,
  PeerAborted,
  InsufficientData,
  TransportClosed,
};

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(FailureReason r) noexcept;

struct SessionConfig {
  std::size_t bits_per_cycle = 4;
  std::size_t fingerprint_bits = 192;  // M; the first M / b cycles are used
  std::shared_ptr<const ecc::BchCode> code;  // its length n is the cutoff
  std::chrono::milliseconds phase_timeout{5000};
  // Test instrumentation: rewrites the reduced fingerprint before decoding.
  std::function<BitVector(const BitVector&)> reduced_hook;
};

/// Local and peer values held by one endpoint.
struct SessionState {
  Phase phase = Phase::Idle;
  fingerprint::Fingerprint local_fingerprint;
  fingerprint::ReliabilityOrder local_order;
  wire::Nonce local_nonce{};
  std::optional<fingerprint::ReliabilityOrder> peer_order;
  std::optional<wire::Nonce> peer_nonce;
  std::optional<ecc::FuzzyKey> key;
  std::optional<crypto::Digest> secret;

  /// Phases only move forward; Failed is reachable from anywhere.
  void advance(Phase next);
};

struct SessionResult {
  bool success = false;
  FailureReason reason = FailureReason::None;
  std::string detail;
  Phase final_phase = Phase::Idle;
  std::optional<crypto::Digest> secret;
  std::optional<ecc::FuzzyKey> key;
  std::vector<std::size_t> applied_order;  // order actually used for reduction
  bool used_peer_order = false;
  std::vector<Bytes> frames;  // every frame sent or received, local order
  std::chrono::microseconds elapsed{0};
};

/// One endpoint of the pairing handshake. Blocks until Established or Failed.
SessionResult run_session(const gait::GaitSequence& local, transport::Transport& channel,
                          const SessionConfig& config, Role role, crypto::RandomSource& rng,
                          PakeEngine& pake);

/// Key confirmation MAC over the canonical transcript, bound to the sender's role.
wire::Confirm confirm_key(const crypto::Digest& secret, std::span<const std::uint8_t> transcript, Role sender);

/// Throws ConfirmMismatch when the MAC does not verify.
void verify_confirm(const crypto::Digest& secret, std::span<const std::uint8_t> transcript, Role sender,
                    const wire::Confirm& confirm);

struct PairingOutcome {
  SessionResult initiator;
  SessionResult responder;

  bool success() const noexcept { return initiator.success && responder.success; }
};

/// Runs both endpoints concurrently over an in-memory channel.
PairingOutcome pair_in_memory(const gait::GaitSequence& a, const gait::GaitSequence& b,
                              const SessionConfig& config_a, const SessionConfig& config_b,
                              crypto::RandomSource& rng_a, crypto::RandomSource& rng_b);

/// Same, over a loopback TCP connection.
PairingOutcome pair_over_tcp(const gait::GaitSequence& a, const gait::GaitSequence& b,
                             const SessionConfig& config_a, const SessionConfig& config_b,
                             crypto::RandomSource& rng_a, crypto::RandomSource& rng_b);

}  // namespace bandana::protocol
