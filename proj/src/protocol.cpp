#include "bandana/protocol.hpp"

#include <future>
#include <thread>

#include "bandana/error.hpp"

namespace bandana::protocol {

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::AwaitExchange: return "AwaitExchange";
    case Phase::AwaitPake: return "AwaitPake";
    case Phase::Established: return "Established";
    case Phase::Failed: return "Failed";
  }
  return "Unknown";
}

std::string_view to_string(FailureReason r) noexcept {
  switch (r) {
    case FailureReason::None: return "None";
    case FailureReason::Timeout: return "Timeout";
    case FailureReason::DecodeFailure: return "DecodeFailure";
    case FailureReason::PakeFailure: return "PakeFailure";
    case FailureReason::MalformedMessage: return "MalformedMessage";
    case FailureReason::ConfirmMismatch: return "ConfirmMismatch";
    case FailureReason::NonceTie: return "NonceTie";
    case FailureReason::PeerAborted: return "PeerAborted";
    case FailureReason::InsufficientData: return "InsufficientData";
    case FailureReason::TransportClosed: return "TransportClosed";
  }
  return "Unknown";
}

void SessionState::advance(Phase next) {
  if (next == Phase::Failed) {
    phase = next;
    return;
  }
  if (phase == Phase::Failed || static_cast<int>(next) <= static_cast<int>(phase)) {
    throw Error(ErrorCode::InvalidArgument, "session phase must progress monotonically");
  }
  if (next != Phase::Established) secret.reset();
  phase = next;
}

namespace {

Bytes confirm_label(Role sender, std::span<const std::uint8_t> transcript) {
  Bytes data;
  const auto label = crypto::as_bytes("bandana-confirm");
  data.insert(data.end(), label.begin(), label.end());
  data.push_back(static_cast<std::uint8_t>(sender));
  const auto h = crypto::sha256(transcript);
  data.insert(data.end(), h.begin(), h.end());
  return data;
}

crypto::Digest confirm_mac_key(const crypto::Digest& secret) {
  return crypto::hmac_sha256(secret, crypto::as_bytes("bandana-confirm-key"));
}

// Session-level failure carrying the reason reported to the caller.
struct SessionAbort {
  FailureReason reason;
  std::string detail;
};

FailureReason reason_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Timeout: return FailureReason::Timeout;
    case ErrorCode::DecodeFailure: return FailureReason::DecodeFailure;
    case ErrorCode::PakeFailure: return FailureReason::PakeFailure;
    case ErrorCode::ConfirmMismatch: return FailureReason::ConfirmMismatch;
    case ErrorCode::TransportClosed: return FailureReason::TransportClosed;
    case ErrorCode::InsufficientData:
    case ErrorCode::TooFewCycles:
    case ErrorCode::CutoffTooLarge:
    case ErrorCode::IndivisibleSegments: return FailureReason::InsufficientData;
    default: return FailureReason::MalformedMessage;
  }
}

class Session {
 public:
  Session(const gait::GaitSequence& local, transport::Transport& channel, const SessionConfig& config,
          Role role, crypto::RandomSource& rng, PakeEngine& pake)
      : local_(local), channel_(channel), config_(config), role_(role), rng_(rng), pake_(pake) {}

  SessionResult run() {
    const auto start = std::chrono::steady_clock::now();
    try {
      handshake();
      result_.success = true;
      result_.secret = state_.secret;
    } catch (const SessionAbort& a) {
      fail(a.reason, a.detail);
    } catch (const Error& e) {
      fail(reason_for(e.code()), e.what());
    }
    result_.final_phase = state_.phase;
    result_.key = state_.key;
    result_.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
    return std::move(result_);
  }

 private:
  void handshake() {
    if (!config_.code) throw SessionAbort{FailureReason::InsufficientData, "no code configured"};

    if (role_ == Role::Initiator) {
      send(wire::AuthRequest{});
    } else {
      expect<wire::AuthRequest>();
    }
    state_.advance(Phase::AwaitExchange);
    derive_local();

    wire::ReliabilityExchange own;
    own.order.assign(state_.local_order.order.begin(), state_.local_order.order.end());
    own.nonce = state_.local_nonce;
    send(own);
    const auto peer = expect<wire::ReliabilityExchange>();
    if (peer.order.size() != state_.local_fingerprint.size()) {
      throw SessionAbort{FailureReason::MalformedMessage, "peer fingerprint length differs"};
    }
    state_.peer_order = fingerprint::ReliabilityOrder{{peer.order.begin(), peer.order.end()}};
    state_.peer_nonce = peer.nonce;
    if (peer.nonce == state_.local_nonce) {
      send_abort("nonce tie");
      throw SessionAbort{FailureReason::NonceTie, "both nonces equal"};
    }
    // Big-endian arrays compare like the integers they encode.
    result_.used_peer_order = peer.nonce > state_.local_nonce;
    const auto& order = result_.used_peer_order ? *state_.peer_order : state_.local_order;
    result_.applied_order = order.order;

    const auto& code = *config_.code;
    auto reduced = fingerprint::reduce(state_.local_fingerprint, order, code.params().n).bits;
    if (config_.reduced_hook) reduced = config_.reduced_hook(reduced);
    try {
      state_.key = code.decode_nearest(reduced);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DecodeFailure) send_abort("decode failure");
      throw;
    }
    state_.advance(Phase::AwaitPake);

    FramePakeChannel pake_channel(*this);
    const Bytes password = ecc::serialize_key(*state_.key);
    crypto::Digest secret;
    try {
      secret = pake_.run(password, role_, pake_channel, rng_);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PakeFailure) send_abort("pake failure");
      throw;
    }

    const Bytes transcript = canonical_transcript();
    send(confirm_key(secret, transcript, role_));
    const auto peer_confirm = expect<wire::Confirm>();
    try {
      verify_confirm(secret, transcript, peer_of(role_), peer_confirm);
    } catch (const Error&) {
      send_abort("confirm mismatch");
      throw;
    }
    state_.advance(Phase::Established);
    state_.secret = secret;
  }

  void derive_local() {
    const std::size_t b = config_.bits_per_cycle;
    if (b == 0 || config_.fingerprint_bits % b != 0) {
      fail_local("fingerprint size must be a multiple of bits per cycle");
    }
    const std::size_t cycles = config_.fingerprint_bits / b;
    if (local_.cycles.size() < cycles) fail_local("gait sequence has fewer cycles than the fingerprint needs");
    if (config_.fingerprint_bits > wire::kMaxOrderLength) fail_local("fingerprint too long for the wire format");
    if (config_.code->params().n > config_.fingerprint_bits) fail_local("code longer than fingerprint");
    gait::GaitSequence used = local_;
    used.cycles.resize(cycles);
    const auto ex = fingerprint::extract(used, b);
    state_.local_fingerprint = ex.fingerprint;
    state_.local_order = ex.order;
    rng_.fill(state_.local_nonce);
    state_.local_nonce[0] &= 0x03;
  }

  [[noreturn]] void fail_local(const std::string& why) {
    send_abort(why);
    throw SessionAbort{FailureReason::InsufficientData, why};
  }

  class FramePakeChannel final : public PakeChannel {
   public:
    explicit FramePakeChannel(Session& s) : s_(s) {}
    void send(std::span<const std::uint8_t> payload) override {
      s_.send(wire::PakeMsg{Bytes(payload.begin(), payload.end())});
    }
    Bytes receive() override { return s_.expect<wire::PakeMsg>().payload; }

   private:
    Session& s_;
  };

  void send(const wire::Message& msg) {
    Bytes frame = wire::encode(msg);
    channel_.send(frame);
    if (!std::holds_alternative<wire::Confirm>(msg)) transcript_.push_back({role_, frame});
    result_.frames.push_back(std::move(frame));
  }

  void send_abort(const std::string& reason) noexcept {
    try {
      Bytes frame = wire::encode(wire::Abort{reason});
      channel_.send(frame);
      result_.frames.push_back(std::move(frame));
    } catch (...) {
      // The session is failing anyway; the peer will time out.
    }
  }

  template <typename T>
  T expect() {
    Bytes frame = channel_.receive(config_.phase_timeout);
    result_.frames.push_back(frame);
    wire::Message msg;
    try {
      msg = wire::decode(frame);
    } catch (const Error& e) {
      send_abort("malformed message");
      throw SessionAbort{FailureReason::MalformedMessage, e.what()};
    }
    if (const auto* abort = std::get_if<wire::Abort>(&msg)) {
      throw SessionAbort{FailureReason::PeerAborted, abort->reason};
    }
    if (!std::holds_alternative<T>(msg)) {
      send_abort("unexpected message");
      throw SessionAbort{FailureReason::MalformedMessage, "unexpected message type for this phase"};
    }
    if (!std::holds_alternative<wire::Confirm>(msg)) transcript_.push_back({peer_of(role_), frame});
    return std::get<T>(std::move(msg));
  }

  Bytes canonical_transcript() const {
    Bytes out;
    for (Role who : {Role::Initiator, Role::Responder}) {
      out.push_back(static_cast<std::uint8_t>(who));
      for (const auto& [sender, frame] : transcript_) {
        if (sender != who) continue;
        const auto len = static_cast<std::uint32_t>(frame.size());
        for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(len >> shift));
        out.insert(out.end(), frame.begin(), frame.end());
      }
    }
    return out;
  }

  void fail(FailureReason reason, std::string detail) {
    state_.advance(Phase::Failed);
    state_.secret.reset();
    result_.success = false;
    result_.secret.reset();
    result_.reason = reason;
    result_.detail = std::move(detail);
  }

  const gait::GaitSequence& local_;
  transport::Transport& channel_;
  const SessionConfig& config_;
  Role role_;
  crypto::RandomSource& rng_;
  PakeEngine& pake_;
  SessionState state_;
  SessionResult result_;
  std::vector<std::pair<Role, Bytes>> transcript_;
};

template <typename MakeTransports>
PairingOutcome run_pair(const gait::GaitSequence& a, const gait::GaitSequence& b, const SessionConfig& config_a,
                        const SessionConfig& config_b, crypto::RandomSource& rng_a, crypto::RandomSource& rng_b,
                        MakeTransports make) {
  auto [ta, tb] = make();
  CommitRevealPake pake_a, pake_b;
  auto responder = std::async(std::launch::async, [&, t = tb.get()] {
    return run_session(b, *t, config_b, Role::Responder, rng_b, pake_b);
  });
  PairingOutcome out;
  out.initiator = run_session(a, *ta, config_a, Role::Initiator, rng_a, pake_a);
  out.responder = responder.get();
  return out;
}

}  // namespace

wire::Confirm confirm_key(const crypto::Digest& secret, std::span<const std::uint8_t> transcript, Role sender) {
  wire::Confirm c;
  c.mac = crypto::hmac_sha256(confirm_mac_key(secret), confirm_label(sender, transcript));
  return c;
}

void verify_confirm(const crypto::Digest& secret, std::span<const std::uint8_t> transcript, Role sender,
                    const wire::Confirm& confirm) {
  const auto expected = confirm_key(secret, transcript, sender);
  if (!crypto::equal(expected.mac, confirm.mac)) {
    throw Error(ErrorCode::ConfirmMismatch, "key confirmation MAC does not verify");
  }
}

SessionResult run_session(const gait::GaitSequence& local, transport::Transport& channel,
                          const SessionConfig& config, Role role, crypto::RandomSource& rng, PakeEngine& pake) {
  return Session(local, channel, config, role, rng, pake).run();
}

PairingOutcome pair_in_memory(const gait::GaitSequence& a, const gait::GaitSequence& b,
                              const SessionConfig& config_a, const SessionConfig& config_b,
                              crypto::RandomSource& rng_a, crypto::RandomSource& rng_b) {
  return run_pair(a, b, config_a, config_b, rng_a, rng_b, [] { return transport::make_memory_pair(); });
}

PairingOutcome pair_over_tcp(const gait::GaitSequence& a, const gait::GaitSequence& b,
                             const SessionConfig& config_a, const SessionConfig& config_b,
                             crypto::RandomSource& rng_a, crypto::RandomSource& rng_b) {
  return run_pair(a, b, config_a, config_b, rng_a, rng_b, [] {
    transport::TcpListener listener;
    auto accepted = std::async(std::launch::async, [&] { return listener.accept(std::chrono::seconds(5)); });
    std::unique_ptr<transport::Transport> client = transport::TcpTransport::connect_loopback(listener.port());
    std::unique_ptr<transport::Transport> server = accepted.get();
    return std::make_pair(std::move(client), std::move(server));
  });
}

}  // namespace bandana::protocol
