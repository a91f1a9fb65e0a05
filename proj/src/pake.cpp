#include "bandana/pake.hpp"

#include "bandana/error.hpp"

namespace bandana::protocol {
namespace {

constexpr std::size_t kSaltBytes = 32;

crypto::Digest commitment(Role role, std::span<const std::uint8_t> salt, std::span<const std::uint8_t> password) {
  Bytes buf;
  const auto label = crypto::as_bytes("bandana-pake-commit");
  buf.insert(buf.end(), label.begin(), label.end());
  buf.push_back(static_cast<std::uint8_t>(role));
  buf.insert(buf.end(), salt.begin(), salt.end());
  buf.insert(buf.end(), password.begin(), password.end());
  return crypto::sha256(buf);
}

}  // namespace

crypto::Digest CommitRevealPake::run(std::span<const std::uint8_t> password, Role role, PakeChannel& channel,
                                     crypto::RandomSource& rng) {
  Bytes salt(kSaltBytes);
  rng.fill(salt);
  const auto own_commit = commitment(role, salt, password);
  channel.send(own_commit);
  const Bytes peer_commit = channel.receive();
  if (peer_commit.size() != own_commit.size()) throw Error(ErrorCode::MalformedMessage, "bad commitment size");

  channel.send(salt);
  const Bytes peer_salt = channel.receive();
  if (peer_salt.size() != kSaltBytes) throw Error(ErrorCode::MalformedMessage, "bad salt size");

  const auto expected = commitment(peer_of(role), peer_salt, password);
  if (!crypto::equal(expected, peer_commit)) {
    throw Error(ErrorCode::PakeFailure, "peer commitment does not match local password");
  }

  // Canonical order: initiator material first.
  const bool initiator = role == Role::Initiator;
  const std::span<const std::uint8_t> salt_i = initiator ? std::span<const std::uint8_t>(salt) : peer_salt;
  const std::span<const std::uint8_t> salt_r = initiator ? std::span<const std::uint8_t>(peer_salt) : salt;
  const std::span<const std::uint8_t> commit_i = initiator ? std::span<const std::uint8_t>(own_commit) : peer_commit;
  const std::span<const std::uint8_t> commit_r = initiator ? std::span<const std::uint8_t>(peer_commit) : own_commit;
  Bytes info;
  const auto label = crypto::as_bytes("bandana-pake-secret");
  info.insert(info.end(), label.begin(), label.end());
  for (auto part : {salt_i, salt_r, commit_i, commit_r}) info.insert(info.end(), part.begin(), part.end());
  return crypto::hmac_sha256(password, info);
}

}  // namespace bandana::protocol
