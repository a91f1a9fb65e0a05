#include <doctest.h>

#include <algorithm>
#include <random>

#include "bandana/fuzzy_ecc.hpp"
#include "support.hpp"

using namespace bandana;
using namespace bandana::ecc;
using testing::throws_code;

namespace {

BitVector poly_from_mask(std::uint32_t mask, std::size_t degree) {
  BitVector p(degree + 1);
  for (std::size_t i = 0; i <= degree; ++i) p[i] = (mask >> i) & 1u;
  return p;
}

// Remainder of a(x) / b(x) over GF(2), coefficients lowest first.
BitVector poly_mod(BitVector a, const BitVector& b) {
  std::size_t db = b.size() - 1;
  while (db > 0 && !b[db]) --db;
  for (std::size_t i = a.size(); i-- > db;) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] ^= b[j];
  }
  a.resize(db);
  return a;
}

bool all_zero(const BitVector& v) {
  return std::all_of(v.begin(), v.end(), [](auto b) { return b == 0; });
}

BitVector random_bits(std::size_t n, std::mt19937_64& rng) {
  BitVector v(n);
  for (auto& b : v) b = rng() & 1u;
  return v;
}

void flip_random(BitVector& v, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t i = 0; i < count; ++i) v[idx[i]] ^= 1u;
}

}  // namespace

TEST_CASE("length-15 codes") {
  const auto t15 = bch_table(4);
  REQUIRE(t15.size() == 4);
  CHECK(t15[0].k == 11);
  CHECK(t15[0].t == 1);
  CHECK(t15[1].k == 7);
  CHECK(t15[1].t == 2);
  CHECK(t15[2].k == 5);
  CHECK(t15[2].t == 3);
  CHECK(t15[3].k == 1);
  CHECK(t15[3].t == 7);
  CHECK(t15[1].generator == poly_from_mask(0x1D1, 8));
  CHECK(t15[2].generator == poly_from_mask(0x537, 10));
}

TEST_CASE("length-127 table and generators divide x^n - 1") {
  const auto table = bch_table(7);
  const std::vector<std::pair<std::size_t, std::size_t>> expected = {
      {120, 1}, {113, 2}, {106, 3}, {99, 4},  {92, 5},  {85, 6},  {78, 7},  {71, 9}, {64, 10},
      {57, 11}, {50, 13}, {43, 14}, {36, 15}, {29, 21}, {22, 23}, {15, 27}, {8, 31}, {1, 63}};
  REQUIRE(table.size() == expected.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(table[i].n == 127);
    CHECK(table[i].k == expected[i].first);
    CHECK(table[i].t == expected[i].second);
    REQUIRE(table[i].generator.size() == 127 - table[i].k + 1);
    BitVector xn(128, 0);
    xn[0] = xn[127] = 1;
    CHECK(all_zero(poly_mod(xn, table[i].generator)));
  }
}

TEST_CASE("minimum distance of BCH(15,5) by enumeration") {
  const auto p = choose_params(15, 0.2);
  CHECK(p.n == 15);
  CHECK(p.k == 5);
  CHECK(p.t == 3);
  const BchCode code(p);
  std::size_t dmin = 15;
  for (std::uint32_t m = 1; m < 32; ++m) {
    const auto c = code.encode(poly_from_mask(m, 4));
    dmin = std::min<std::size_t>(dmin, static_cast<std::size_t>(std::count(c.begin(), c.end(), 1)));
  }
  CHECK(dmin == 7);
}

TEST_CASE("parameter choice") {
  const auto p = choose_params(128, 0.2);
  CHECK(p.n == 127);
  CHECK(p.t == 27);  // smallest tabulated t with t/n >= 0.2
  CHECK(p.k == 15);
  CHECK(static_cast<double>(p.t) / static_cast<double>(p.n) >= 0.2);
  CHECK(choose_params(127, 0.01).t == 2);
  CHECK(choose_params(127, 0.45).t == 63);  // nothing else reaches the rate
  CHECK(throws_code([] { choose_params(128, 0.0); }, ErrorCode::NoSuitableCode));
  CHECK(throws_code([] { choose_params(5, 0.2); }, ErrorCode::NoSuitableCode));
}

TEST_CASE("encoding is systematic and linear") {
  const BchCode code(choose_params(128, 0.2));
  const auto& p = code.params();
  CHECK(all_zero(code.encode(BitVector(p.k, 0))));
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto m1 = random_bits(p.k, rng), m2 = random_bits(p.k, rng);
    const auto c1 = code.encode(m1), c2 = code.encode(m2);
    CHECK(code.message_of(c1) == m1);
    CHECK(all_zero(poly_mod(c1, p.generator)));
    BitVector sum(p.n), msum(p.k);
    for (std::size_t j = 0; j < p.n; ++j) sum[j] = c1[j] ^ c2[j];
    for (std::size_t j = 0; j < p.k; ++j) msum[j] = m1[j] ^ m2[j];
    CHECK(code.encode(msum) == sum);
  }
}

TEST_CASE("bounded decoding corrects up to t errors") {
  const BchCode code(choose_params(128, 0.2));
  const auto& p = code.params();
  std::mt19937_64 rng(33);
  for (int i = 0; i < 300; ++i) {
    const auto m = random_bits(p.k, rng);
    auto r = code.encode(m);
    const std::size_t e = static_cast<std::size_t>(i) % (p.t + 1);
    flip_random(r, e, rng);
    const auto key = code.decode(r);
    CHECK(key.key_bits == m);
    CHECK(key.corrected_errors == e);
  }
  const auto c = code.encode(BitVector(p.k, 1));
  CHECK(code.decode(c).corrected_errors == 0);
}

TEST_CASE("decoding beyond t") {
  const auto code = BchCode::with_designed_t(4, 3);
  std::mt19937_64 rng(8);
  std::size_t failures = 0;
  for (int i = 0; i < 200; ++i) {
    auto r = code.encode(random_bits(5, rng));
    flip_random(r, 5, rng);
    try {
      const auto k = code.decode(r);
      CHECK(hamming_distance(code.encode(k.key_bits), r) <= 3);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DecodeFailure);
      ++failures;
    }
  }
  CHECK(failures > 0);
}

TEST_CASE("nearest-codeword decoding matches brute force") {
  const auto code = BchCode::with_designed_t(4, 3);
  std::mt19937_64 rng(19);
  for (int i = 0; i < 500; ++i) {
    const auto r = random_bits(15, rng);
    std::size_t best = 16;
    std::uint32_t best_m = 0;
    for (std::uint32_t m = 0; m < 32; ++m) {
      const auto d = hamming_distance(code.encode(poly_from_mask(m, 4)), r);
      if (d < best) {
        best = d;
        best_m = m;
      }
    }
    const auto k = code.decode_nearest(r);
    CHECK(k.corrected_errors == best);
    if (best <= 3) CHECK(k.key_bits == poly_from_mask(best_m, 4));
    CHECK(hamming_distance(code.encode(k.key_bits), r) == best);
  }
}

TEST_CASE("two words near one codeword give the same key") {
  const BchCode code(choose_params(128, 0.2));
  std::mt19937_64 rng(44);
  for (int i = 0; i < 50; ++i) {
    const auto c = code.encode(random_bits(15, rng));
    auto a = c, b = c;
    flip_random(a, 27, rng);
    flip_random(b, 20, rng);
    CHECK(code.decode(a).key_bits == code.decode(b).key_bits);
  }
}

TEST_CASE("fingerprint entry point and key serialization") {
  const BchCode code(choose_params(128, 0.2));
  fingerprint::ReducedFingerprint fp;
  fp.bits = code.encode(poly_from_mask(0x5A5A, 14));
  const auto key = decode(fp, code);
  CHECK(key.key_bits == poly_from_mask(0x5A5A, 14));
  const auto bytes = serialize_key(key);
  REQUIRE(bytes.size() == 2);
  CHECK(unpack_bits(bytes, 15) == key.key_bits);
  fp.bits.push_back(0);
  CHECK(throws_code([&] { decode(fp, code); }, ErrorCode::LengthMismatch));
}
