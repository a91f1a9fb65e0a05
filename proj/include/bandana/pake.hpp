#pragma once

#include <cstdint>
#include <span>

#include "bandana/bits.hpp"
#include "bandana/crypto.hpp"

namespace bandana::protocol {

enum class Role : std::uint8_t { Initiator = 0x41, Responder = 0x42 };

inline Role peer_of(Role r) noexcept { return r == Role::Initiator ? Role::Responder : Role::Initiator; }

/// Carries opaque PAKE payloads between the two endpoints.
class PakeChannel {
 public:
  virtual ~PakeChannel() = default;
  virtual void send(std::span<const std::uint8_t> payload) = 0;
  virtual Bytes receive() = 0;
};

/// Turns the error-corrected key into a strong shared secret. Both sides
/// obtain equal secrets iff their passwords match; a mismatch throws
/// PakeFailure rather than yielding unequal secrets.
class PakeEngine {
 public:
  virtual ~PakeEngine() = default;
  virtual crypto::Digest run(std::span<const std::uint8_t> password, Role role, PakeChannel& channel,
                             crypto::RandomSource& rng) = 0;
};

/// Simulation-grade engine: hash commitment over (role, salt, password),
/// reveal of the salts, secret = HMAC(password, salts || commitments).
///
/// A transcript lets an eavesdropper test password guesses offline, so this
/// is only suitable for in-process and loopback testing. A real deployment
/// plugs J-PAKE or SRP in behind PakeEngine.
class CommitRevealPake final : public PakeEngine {
 public:
  crypto::Digest run(std::span<const std::uint8_t> password, Role role, PakeChannel& channel,
                     crypto::RandomSource& rng) override;
};

}  // namespace bandana::protocol
