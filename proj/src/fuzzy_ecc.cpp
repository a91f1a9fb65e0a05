#include "bandana/fuzzy_ecc.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <set>

#include "bandana/error.hpp"

namespace bandana::ecc {
namespace {

constexpr unsigned kMinM = 3;
constexpr unsigned kMaxM = 12;

unsigned primitive_polynomial(unsigned m) {
  static constexpr unsigned table[] = {0,     0,     0,     0xB,   0x13,  0x25,  0x43,
                                       0x89,  0x11D, 0x211, 0x409, 0x805, 0x1053};
  if (m < kMinM || m > kMaxM) throw Error(ErrorCode::NoSuitableCode, "unsupported field size");
  return table[m];
}

class GaloisField {
 public:
  explicit GaloisField(unsigned m) : m_(m), n_((1u << m) - 1), exp_(2 * n_), log_(n_ + 1, 0) {
    const unsigned poly = primitive_polynomial(m);
    unsigned x = 1;
    for (unsigned i = 0; i < n_; ++i) {
      exp_[i] = x;
      log_[x] = i;
      x <<= 1;
      if (x & (1u << m)) x ^= poly;
    }
    for (unsigned i = n_; i < 2 * n_; ++i) exp_[i] = exp_[i - n_];
  }

  unsigned n() const { return n_; }
  unsigned alpha_pow(std::size_t e) const { return exp_[e % n_]; }
  unsigned mul(unsigned a, unsigned b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  unsigned div(unsigned a, unsigned b) const {
    if (b == 0) throw Error(ErrorCode::InvalidArgument, "division by zero in GF(2^m)");
    if (a == 0) return 0;
    return exp_[(log_[a] + n_ - log_[b]) % n_];
  }

 private:
  unsigned m_;
  unsigned n_;
  std::vector<unsigned> exp_;
  std::vector<unsigned> log_;
};

std::set<std::size_t> cyclotomic_coset(std::size_t i, std::size_t n) {
  std::set<std::size_t> c;
  std::size_t x = i % n;
  while (c.insert(x).second) x = (2 * x) % n;
  return c;
}

// Roots of the narrow-sense code with designed correction radius t.
std::set<std::size_t> root_exponents(std::size_t n, std::size_t designed_t) {
  std::set<std::size_t> roots;
  for (std::size_t i = 1; i <= 2 * designed_t && i < n; ++i) {
    if (roots.count(i)) continue;
    const auto c = cyclotomic_coset(i, n);
    roots.insert(c.begin(), c.end());
  }
  return roots;
}

BitVector generator_from_roots(const GaloisField& gf, const std::set<std::size_t>& roots) {
  // Product of (x + alpha^r) over GF(2^m); the result has binary coefficients.
  std::vector<unsigned> g{1};
  for (std::size_t r : roots) {
    const unsigned a = gf.alpha_pow(r);
    std::vector<unsigned> next(g.size() + 1, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      next[i + 1] ^= g[i];
      next[i] ^= gf.mul(g[i], a);
    }
    g = std::move(next);
  }
  BitVector out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 1) throw Error(ErrorCode::InvalidArgument, "generator is not binary");
    out[i] = static_cast<std::uint8_t>(g[i]);
  }
  return out;
}

std::size_t bch_bound_t(const std::set<std::size_t>& roots) {
  std::size_t run = 0;
  while (roots.count(run + 1)) ++run;
  return run / 2;
}

CodeParams make_params(unsigned m, std::size_t designed_t) {
  const GaloisField gf(m);
  const auto roots = root_exponents(gf.n(), designed_t);
  CodeParams p;
  p.m = m;
  p.n = gf.n();
  p.generator = generator_from_roots(gf, roots);
  p.k = p.n - (p.generator.size() - 1);
  p.t = bch_bound_t(roots);
  return p;
}

using Word = std::uint64_t;

std::vector<Word> to_words(std::span<const std::uint8_t> bits) {
  std::vector<Word> w((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1u) w[i / 64] |= Word{1} << (i % 64);
  }
  return w;
}

}  // namespace

std::vector<CodeParams> bch_table(unsigned m) {
  std::vector<CodeParams> out;
  const std::size_t n = (std::size_t{1} << m) - 1;
  for (std::size_t t = 1; 2 * t < n; ++t) {
    CodeParams p = make_params(m, t);
    if (p.k == 0) break;
    if (!out.empty() && out.back().k == p.k) continue;
    out.push_back(std::move(p));
  }
  return out;
}

CodeParams choose_params(std::size_t N, double error_rate) {
  if (!(error_rate > 0.0) || !(error_rate < 0.5)) {
    throw Error(ErrorCode::NoSuitableCode, "error rate must lie in (0, 0.5)");
  }
  unsigned m = 0;
  while (((std::size_t{1} << (m + 1)) - 1) <= N) ++m;
  if (m < kMinM) throw Error(ErrorCode::NoSuitableCode, "fingerprint too short for any BCH code");
  m = std::min(m, kMaxM);
  const auto table = bch_table(m);
  if (table.empty()) throw Error(ErrorCode::NoSuitableCode, "no BCH code for this length");
  for (const auto& p : table) {
    if (static_cast<double>(p.t) / static_cast<double>(p.n) >= error_rate) return p;
  }
  return table.back();
}

struct BchCode::Impl {
  CodeParams params;
  GaloisField gf;
  std::vector<Word> basis;  // codeword of each unit message, flattened
  std::size_t words = 0;

  mutable std::once_flag codebook_once;
  mutable std::vector<Word> codebook;

  explicit Impl(const CodeParams& p) : params(p), gf(p.m) {}

  BitVector encode(std::span<const std::uint8_t> msg) const {
    const std::size_t n = params.n, k = params.k, r = n - k;
    BitVector cw(n, 0);
    for (std::size_t i = 0; i < k; ++i) cw[r + i] = msg[i] & 1u;
    // Remainder of x^r m(x) modulo g(x), long division from the top.
    BitVector rem(cw);
    for (std::size_t i = n; i-- > r;) {
      if (!rem[i]) continue;
      for (std::size_t j = 0; j <= r; ++j) rem[i - r + j] ^= params.generator[j];
    }
    for (std::size_t i = 0; i < r; ++i) cw[i] = rem[i];
    return cw;
  }

  void build_codebook() const {
    const std::size_t count = std::size_t{1} << params.k;
    codebook.assign(count * words, 0);
    for (std::size_t idx = 1; idx < count; ++idx) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(idx));
      const std::size_t prev = idx & (idx - 1);
      for (std::size_t w = 0; w < words; ++w) {
        codebook[idx * words + w] = codebook[prev * words + w] ^ basis[low * words + w];
      }
    }
  }
};

BchCode::BchCode(const CodeParams& params) {
  if (params.m < kMinM || params.m > kMaxM || params.n != (std::size_t{1} << params.m) - 1 ||
      params.k == 0 || params.k >= params.n || params.generator.size() != params.n - params.k + 1) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent BCH parameters");
  }
  auto impl = std::make_shared<Impl>(params);
  impl->words = (params.n + 63) / 64;
  for (std::size_t i = 0; i < params.k; ++i) {
    BitVector unit(params.k, 0);
    unit[i] = 1;
    const auto w = to_words(impl->encode(unit));
    impl->basis.insert(impl->basis.end(), w.begin(), w.end());
  }
  impl_ = std::move(impl);
}

BchCode BchCode::with_designed_t(unsigned m, std::size_t designed_t) {
  return BchCode(make_params(m, designed_t));
}

const CodeParams& BchCode::params() const noexcept { return impl_->params; }

BitVector BchCode::encode(std::span<const std::uint8_t> message) const {
  if (message.size() != impl_->params.k) throw Error(ErrorCode::LengthMismatch, "message length must equal k");
  return impl_->encode(message);
}

BitVector BchCode::message_of(std::span<const std::uint8_t> codeword) const {
  const auto& p = impl_->params;
  if (codeword.size() != p.n) throw Error(ErrorCode::LengthMismatch, "codeword length must equal n");
  return {codeword.begin() + static_cast<std::ptrdiff_t>(p.n - p.k), codeword.end()};
}

FuzzyKey BchCode::decode(std::span<const std::uint8_t> received) const {
  const auto& p = impl_->params;
  const auto& gf = impl_->gf;
  if (received.size() != p.n) throw Error(ErrorCode::LengthMismatch, "received length must equal n");
  const std::size_t t = p.t;

  std::vector<unsigned> syn(2 * t + 1, 0);
  bool clean = true;
  for (std::size_t j = 1; j <= 2 * t; ++j) {
    unsigned s = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
      if (received[i] & 1u) s ^= gf.alpha_pow(i * j);
    }
    syn[j] = s;
    clean = clean && s == 0;
  }
  BitVector word(received.begin(), received.end());
  for (auto& b : word) b &= 1u;
  if (clean) return {message_of(word), p, 0};

  // Berlekamp-Massey for the error locator.
  std::vector<unsigned> locator{1}, prev{1};
  std::size_t length = 0, shift = 1;
  unsigned prev_disc = 1;
  for (std::size_t r = 0; r < 2 * t; ++r) {
    unsigned d = syn[r + 1];
    for (std::size_t i = 1; i <= length && i < locator.size(); ++i) d ^= gf.mul(locator[i], syn[r + 1 - i]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const unsigned coef = gf.div(d, prev_disc);
    std::vector<unsigned> next = locator;
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= gf.mul(coef, prev[i]);
    if (2 * length <= r) {
      prev = locator;
      length = r + 1 - length;
      prev_disc = d;
      shift = 1;
    } else {
      ++shift;
    }
    locator = std::move(next);
  }
  while (locator.size() > 1 && locator.back() == 0) locator.pop_back();
  if (length > t || locator.size() - 1 != length) {
    throw Error(ErrorCode::DecodeFailure, "error locator degree exceeds correction radius");
  }

  // Chien search: position i is in error iff locator(alpha^-i) == 0.
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < p.n; ++i) {
    const std::size_t inv = (p.n - i) % p.n;
    unsigned v = 0;
    for (std::size_t d = 0; d < locator.size(); ++d) v ^= gf.mul(locator[d], gf.alpha_pow(inv * d));
    if (v == 0) positions.push_back(i);
  }
  if (positions.size() != length) {
    throw Error(ErrorCode::DecodeFailure, "error locator roots do not match its degree");
  }
  for (std::size_t pos : positions) word[pos] ^= 1u;

  FuzzyKey key{message_of(word), p, positions.size()};
  const std::size_t check = hamming_distance(impl_->encode(key.key_bits), received);
  if (check != positions.size() || check > t) {
    throw Error(ErrorCode::DecodeFailure, "corrected word is not a codeword within radius");
  }
  return key;
}

FuzzyKey BchCode::decode_nearest(std::span<const std::uint8_t> received) const {
  const auto& p = impl_->params;
  if (received.size() != p.n) throw Error(ErrorCode::LengthMismatch, "received length must equal n");
  try {
    return decode(received);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DecodeFailure || p.k > kMaxExhaustiveK) throw;
  }
  std::call_once(impl_->codebook_once, [this] { impl_->build_codebook(); });
  const auto target = to_words(received);
  const std::size_t words = impl_->words;
  const std::size_t count = std::size_t{1} << p.k;
  std::size_t best = 0;
  std::size_t best_d = p.n + 1;
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words; ++w) {
      d += static_cast<std::size_t>(std::popcount(impl_->codebook[idx * words + w] ^ target[w]));
    }
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  FuzzyKey key;
  key.params = p;
  key.corrected_errors = best_d;
  key.key_bits.resize(p.k);
  for (std::size_t i = 0; i < p.k; ++i) key.key_bits[i] = (best >> i) & 1u;
  return key;
}

FuzzyKey decode(const fingerprint::ReducedFingerprint& fp, const BchCode& code) {
  if (fp.bits.size() != code.params().n) {
    throw Error(ErrorCode::LengthMismatch, "reduced fingerprint length must equal code length");
  }
  return code.decode(fp.bits);
}

Bytes serialize_key(const FuzzyKey& key) { return pack_bits(key.key_bits); }

}  // namespace bandana::ecc
