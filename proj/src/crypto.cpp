#include "bandana/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <cstring>

#include "bandana/error.hpp"

namespace bandana::crypto {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 failed");
  }
  return out;
}

Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
           out.data(), &len) == nullptr ||
      len != out.size()) {
    throw Error(ErrorCode::InvalidArgument, "HMAC-SHA-256 failed");
  }
  return out;
}

bool equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto byte : b) v = (v << 8) | byte;
  return v;
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::InvalidArgument, "system entropy source failed");
  }
}

struct SeededRandom::State {
  EVP_CIPHER_CTX* ctx = nullptr;
};

SeededRandom::SeededRandom(std::uint64_t seed) : state_(std::make_unique<State>()) {
  std::array<std::uint8_t, 32> key{};
  for (int i = 0; i < 8; ++i) key[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  std::array<std::uint8_t, 16> iv{};  // 32-bit counter + 96-bit nonce, all zero
  state_->ctx = EVP_CIPHER_CTX_new();
  if (!state_->ctx ||
      EVP_EncryptInit_ex(state_->ctx, EVP_chacha20(), nullptr, key.data(), iv.data()) != 1) {
    throw Error(ErrorCode::InvalidArgument, "ChaCha20 initialisation failed");
  }
}

SeededRandom::~SeededRandom() {
  if (state_ && state_->ctx) EVP_CIPHER_CTX_free(state_->ctx);
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  std::memset(out.data(), 0, out.size());
  int len = 0;
  if (EVP_EncryptUpdate(state_->ctx, out.data(), &len, out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::InvalidArgument, "ChaCha20 keystream failed");
  }
}

}  // namespace bandana::crypto
