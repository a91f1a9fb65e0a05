#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "bandana/bits.hpp"

namespace bandana::transport {

/// Ordered, message-preserving channel carrying whole wire frames.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::span<const std::uint8_t> frame) = 0;
  /// Throws Timeout when nothing arrives in time, TransportClosed when the
  /// peer is gone.
  virtual Bytes receive(std::chrono::milliseconds timeout) = 0;
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_pair();

/// Wraps another transport and keeps a copy of every frame in both directions.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}
  void send(std::span<const std::uint8_t> frame) override;
  Bytes receive(std::chrono::milliseconds timeout) override;

  /// All frames seen so far, in local send/receive order.
  std::vector<Bytes> frames() const;

 private:
  Transport& inner_;
  mutable std::mutex mutex_;
  std::vector<Bytes> frames_;
};

/// Framed stream over a connected TCP socket.
class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) noexcept : fd_(fd) {}
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  static std::unique_ptr<TcpTransport> connect_loopback(std::uint16_t port);

  void send(std::span<const std::uint8_t> frame) override;
  Bytes receive(std::chrono::milliseconds timeout) override;

 private:
  void read_exact(std::uint8_t* dst, std::size_t len, std::chrono::steady_clock::time_point deadline);
  int fd_;
};

/// Listening socket bound to 127.0.0.1; port 0 picks an ephemeral port.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port = 0);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  std::unique_ptr<TcpTransport> accept(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace bandana::transport
