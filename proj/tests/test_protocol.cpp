#include <doctest.h>

#include <algorithm>
#include <future>
#include <random>

#include "bandana/crypto.hpp"
#include "bandana/protocol.hpp"
#include "bandana/transport.hpp"
#include "bandana/wire.hpp"
#include "support.hpp"

using namespace bandana;
using namespace bandana::protocol;
using testing::random_sequence;
using testing::throws_code;

namespace {

SessionConfig default_config() {
  SessionConfig c;
  c.code = std::make_shared<ecc::BchCode>(ecc::choose_params(128, 0.2));
  return c;
}

// Reduced fingerprint the initiator will see for `seq` when `order` wins.
BitVector reduced_of(const gait::GaitSequence& seq, std::span<const std::size_t> order, std::size_t n) {
  auto used = seq;
  used.cycles.resize(48);
  const auto ex = fingerprint::extract(used, 4);
  return fingerprint::reduce(ex.fingerprint, fingerprint::ReliabilityOrder{{order.begin(), order.end()}}, n).bits;
}

bool contains(const Bytes& hay, std::span<const std::uint8_t> needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("wire round trips") {
  wire::ReliabilityExchange re;
  re.order.resize(192);
  for (std::size_t i = 0; i < 192; ++i) re.order[i] = static_cast<std::uint16_t>((i * 7) % 192);
  re.nonce[0] = 0x03;
  re.nonce[11] = 0xAB;
  wire::Confirm cf;
  cf.mac[5] = 9;
  const std::vector<wire::Message> msgs = {wire::AuthRequest{}, re, wire::PakeMsg{{1, 2, 3}}, cf,
                                           wire::Abort{"decode failure"}};
  for (const auto& m : msgs) {
    const auto f = wire::encode(m);
    CHECK(f[0] == wire::kVersion);
    CHECK(f[1] == static_cast<std::uint8_t>(wire::type_of(m)));
    CHECK(wire::payload_length(f) == f.size() - wire::kHeaderSize);
    CHECK(wire::encode(wire::decode(f)) == f);
  }
  const auto f = wire::encode(re);
  CHECK(f.size() == 4 + 2 + 192 + 12);
  const auto back = std::get<wire::ReliabilityExchange>(wire::decode(f));
  CHECK(back.order == re.order);
  CHECK(back.nonce == re.nonce);
}

TEST_CASE("malformed frames are rejected") {
  auto bad = [](Bytes f) { return throws_code([&] { wire::decode(f); }, ErrorCode::MalformedMessage); };
  CHECK(bad({0x01, 0x01}));
  CHECK(bad({0x02, 0x01, 0x00, 0x00}));
  CHECK(bad({0x01, 0x09, 0x00, 0x00}));
  CHECK(bad({0x01, 0x01, 0x00, 0x01, 0x00}));
  CHECK(bad({0x01, 0x04, 0x00, 0x02, 0x00, 0x00}));
  CHECK(bad({0x01, 0x03, 0x00, 0x05, 0x00}));

  wire::ReliabilityExchange re;
  re.order = {0, 1, 2, 3};
  auto f = wire::encode(re);
  auto dup = f;
  dup[6 + 1] = 0;  // order {0, 0, 2, 3}
  CHECK(bad(dup));
  auto pad = f;
  pad[6 + 4] = 0x04;  // a pad bit of the nonce
  CHECK(bad(pad));

  wire::ReliabilityExchange wide = re;
  wide.nonce[0] = 0x80;
  CHECK_FALSE(wire::valid_nonce(wide.nonce));
  CHECK(throws_code([&] { wire::encode(wide); }, ErrorCode::InvalidArgument));
}

TEST_CASE("phases only move forward") {
  SessionState s;
  s.advance(Phase::AwaitExchange);
  s.advance(Phase::AwaitPake);
  CHECK(throws_code([&] { s.advance(Phase::AwaitExchange); }, ErrorCode::InvalidArgument));
  s.advance(Phase::Failed);
  CHECK(s.phase == Phase::Failed);
  CHECK_FALSE(s.secret.has_value());
  SessionState idle;
  idle.advance(Phase::Failed);
  CHECK(idle.phase == Phase::Failed);
}

TEST_CASE("commit-reveal PAKE") {
  auto [ta, tb] = transport::make_memory_pair();
  struct Chan final : PakeChannel {
    transport::Transport& t;
    explicit Chan(transport::Transport& x) : t(x) {}
    void send(std::span<const std::uint8_t> p) override { t.send(p); }
    Bytes receive() override { return t.receive(std::chrono::milliseconds(2000)); }
  };
  auto run = [&](Bytes pa, Bytes pb) {
    Chan ca(*ta), cb(*tb);
    crypto::SeededRandom ra(1), rb(2);
    CommitRevealPake ea, eb;
    auto fb = std::async(std::launch::async, [&] { return eb.run(pb, Role::Responder, cb, rb); });
    const auto sa = ea.run(pa, Role::Initiator, ca, ra);
    return std::make_pair(sa, fb.get());
  };
  const auto [s1, s2] = run({1, 2, 3}, {1, 2, 3});
  CHECK(s1 == s2);
  CHECK(throws_code([&] { run({1, 2, 3}, {1, 2, 4}); }, ErrorCode::PakeFailure));
}

TEST_CASE("identical inputs establish equal secrets") {
  const auto seq = random_sequence(60, 40, 1);
  const auto cfg = default_config();
  crypto::SeededRandom ra(10), rb(11);
  const auto out = pair_in_memory(seq, seq, cfg, cfg, ra, rb);
  REQUIRE(out.success());
  CHECK(out.initiator.secret == out.responder.secret);
  CHECK(out.initiator.final_phase == Phase::Established);
  CHECK(out.initiator.key->key_bits == out.responder.key->key_bits);
  CHECK(out.initiator.used_peer_order != out.responder.used_peer_order);
  CHECK(out.initiator.applied_order == out.responder.applied_order);
}

TEST_CASE("independent inputs fail") {
  const auto cfg = default_config();
  for (std::uint64_t s = 0; s < 10; ++s) {
    crypto::SeededRandom ra(100 + s), rb(200 + s);
    const auto out = pair_in_memory(random_sequence(48, 40, 2 * s + 1), random_sequence(48, 40, 2 * s + 2), cfg,
                                    cfg, ra, rb);
    CHECK_FALSE(out.initiator.success);
    CHECK_FALSE(out.responder.success);
    CHECK_FALSE(out.initiator.secret.has_value());
    CHECK((out.initiator.reason == FailureReason::PakeFailure || out.initiator.reason == FailureReason::PeerAborted));
  }
}

TEST_CASE("errors within t of a common codeword are tolerated") {
  const auto seq = random_sequence(48, 40, 77);
  const auto base = default_config();
  const auto& code = *base.code;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto cfg_b = base;
    cfg_b.reduced_hook = [&](const BitVector& r) {
      auto c = code.encode(code.decode_nearest(r).key_bits);
      std::vector<std::size_t> idx(c.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < code.params().t; ++i) c[idx[i]] ^= 1u;
      return c;
    };
    crypto::SeededRandom ra(300 + trial), rb(400 + trial);
    const auto out = pair_in_memory(seq, seq, base, cfg_b, ra, rb);
    CHECK(out.success());
    CHECK(out.responder.key->corrected_errors == code.params().t);
  }
}

TEST_CASE("transcripts carry no fingerprint bits") {
  const auto seq = random_sequence(48, 40, 4);
  const auto cfg = default_config();
  crypto::SeededRandom ra(1), rb(2);
  const auto out = pair_in_memory(seq, seq, cfg, cfg, ra, rb);
  REQUIRE(out.success());
  const auto ex = fingerprint::extract(seq, 4);
  const auto full = pack_bits(ex.fingerprint.bits);
  const auto reduced = pack_bits(reduced_of(seq, out.initiator.applied_order, 127));
  Bytes all;
  for (const auto& f : out.initiator.frames) all.insert(all.end(), f.begin(), f.end());
  for (std::size_t i = 0; i + 8 <= full.size(); ++i) CHECK_FALSE(contains(all, std::span(full).subspan(i, 8)));
  for (std::size_t i = 0; i + 8 <= reduced.size(); ++i) CHECK_FALSE(contains(all, std::span(reduced).subspan(i, 8)));
  // One byte per bit, as an unpacked dump would look.
  CHECK_FALSE(contains(all, std::span(ex.fingerprint.bits).subspan(0, 32)));
}

TEST_CASE("nonce tie aborts") {
  const auto seq = random_sequence(48, 40, 3);
  const auto cfg = default_config();
  crypto::SeededRandom ra(9), rb(9);
  const auto out = pair_in_memory(seq, seq, cfg, cfg, ra, rb);
  CHECK_FALSE(out.initiator.success);
  CHECK(out.initiator.reason == FailureReason::NonceTie);
}

TEST_CASE("too few cycles reports insufficient data") {
  const auto cfg = default_config();
  crypto::SeededRandom ra(1), rb(2);
  const auto out = pair_in_memory(random_sequence(20, 40, 1), random_sequence(48, 40, 1), cfg, cfg, ra, rb);
  CHECK(out.initiator.reason == FailureReason::InsufficientData);
  CHECK(out.responder.reason == FailureReason::PeerAborted);
}

TEST_CASE("malformed and unexpected frames abort the session") {
  auto cfg = default_config();
  cfg.phase_timeout = std::chrono::milliseconds(1000);
  const auto seq = random_sequence(48, 40, 6);
  CommitRevealPake pake;

  auto [local, remote] = transport::make_memory_pair();
  crypto::SeededRandom r1(1);
  auto fut = std::async(std::launch::async, [&] { return run_session(seq, *local, cfg, Role::Responder, r1, pake); });
  const Bytes garbage = {0x01, 0x02, 0x00, 0x01, 0xFF};
  remote->send(garbage);
  const auto res = fut.get();
  CHECK(res.reason == FailureReason::MalformedMessage);
  CHECK(wire::type_of(wire::decode(remote->receive(std::chrono::milliseconds(1000)))) == wire::MessageType::Abort);

  auto [l2, r2] = transport::make_memory_pair();
  crypto::SeededRandom r3(3);
  auto fut2 = std::async(std::launch::async, [&] { return run_session(seq, *l2, cfg, Role::Responder, r3, pake); });
  r2->send(wire::encode(wire::Abort{"bye"}));
  CHECK(fut2.get().reason == FailureReason::PeerAborted);

  auto [l3, r4] = transport::make_memory_pair();
  crypto::SeededRandom r5(5);
  cfg.phase_timeout = std::chrono::milliseconds(50);
  const auto quiet = run_session(seq, *l3, cfg, Role::Responder, r5, pake);
  CHECK(quiet.reason == FailureReason::Timeout);
  CHECK(quiet.final_phase == Phase::Failed);
}

TEST_CASE("key confirmation") {
  crypto::Digest s{};
  s[0] = 1;
  const Bytes tr = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto c = confirm_key(s, tr, Role::Initiator);
  CHECK_NOTHROW(verify_confirm(s, tr, Role::Initiator, c));
  CHECK(throws_code([&] { verify_confirm(s, tr, Role::Responder, c); }, ErrorCode::ConfirmMismatch));
  auto s2 = s;
  s2[31] ^= 0x01;
  CHECK(throws_code([&] { verify_confirm(s2, tr, Role::Initiator, c); }, ErrorCode::ConfirmMismatch));

  std::mt19937_64 rng(12);
  Bytes big(256);
  for (auto& b : big) b = static_cast<std::uint8_t>(rng());
  const auto cb = confirm_key(s, big, Role::Responder);
  std::size_t accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    auto t = big;
    t[rng() % t.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      verify_confirm(s, t, Role::Responder, cb);
      ++accepted;
    } catch (const Error&) {
    }
  }
  CHECK(accepted == 0);
}

TEST_CASE("pairing over loopback TCP") {
  const auto seq = random_sequence(48, 40, 8);
  const auto cfg = default_config();
  crypto::SeededRandom ra(21), rb(22);
  const auto out = pair_over_tcp(seq, seq, cfg, cfg, ra, rb);
  CHECK(out.success());
  CHECK(out.initiator.secret == out.responder.secret);
}

TEST_CASE("recording transport keeps both directions") {
  auto [a, b] = transport::make_memory_pair();
  transport::RecordingTransport rec(*a);
  rec.send(Bytes{1, 2});
  b->send(Bytes{3});
  CHECK(rec.receive(std::chrono::milliseconds(100)) == Bytes{3});
  CHECK(b->receive(std::chrono::milliseconds(100)) == Bytes{1, 2});
  CHECK(rec.frames() == std::vector<Bytes>{{1, 2}, {3}});
  CHECK(throws_code([&] { b->receive(std::chrono::milliseconds(10)); }, ErrorCode::Timeout));
}

TEST_CASE("seeded random is reproducible") {
  crypto::SeededRandom a(5), b(5), c(6);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  const std::string abc = "abc";
  const auto d = crypto::sha256(crypto::as_bytes(abc));
  CHECK(d[0] == 0xba);
  CHECK(d[31] == 0xad);
}
