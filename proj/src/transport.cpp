#include "bandana/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>

#include "bandana/error.hpp"
#include "bandana/wire.hpp"

namespace bandana::transport {
namespace {

struct Queue {
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<Bytes> frames;
  bool closed = false;
};

class MemoryEndpoint final : public Transport {
 public:
  MemoryEndpoint(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out)
      : in_(std::move(in)), out_(std::move(out)) {}

  ~MemoryEndpoint() override {
    std::lock_guard lock(out_->mutex);
    out_->closed = true;
    out_->cv.notify_all();
  }

  void send(std::span<const std::uint8_t> frame) override {
    std::lock_guard lock(out_->mutex);
    if (out_->closed) throw Error(ErrorCode::TransportClosed, "peer endpoint closed");
    out_->frames.emplace_back(frame.begin(), frame.end());
    out_->cv.notify_all();
  }

  Bytes receive(std::chrono::milliseconds timeout) override {
    std::unique_lock lock(in_->mutex);
    if (!in_->cv.wait_for(lock, timeout, [&] { return !in_->frames.empty() || in_->closed; })) {
      throw Error(ErrorCode::Timeout, "no frame within timeout");
    }
    if (in_->frames.empty()) throw Error(ErrorCode::TransportClosed, "peer endpoint closed");
    Bytes f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

 private:
  std::shared_ptr<Queue> in_;
  std::shared_ptr<Queue> out_;
};

[[noreturn]] void io_error(const char* what) {
  throw Error(ErrorCode::IoError, std::string(what) + ": " + std::strerror(errno));
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_pair() {
  auto a_to_b = std::make_shared<Queue>();
  auto b_to_a = std::make_shared<Queue>();
  return {std::make_unique<MemoryEndpoint>(b_to_a, a_to_b), std::make_unique<MemoryEndpoint>(a_to_b, b_to_a)};
}

void RecordingTransport::send(std::span<const std::uint8_t> frame) {
  {
    std::lock_guard lock(mutex_);
    frames_.emplace_back(frame.begin(), frame.end());
  }
  inner_.send(frame);
}

Bytes RecordingTransport::receive(std::chrono::milliseconds timeout) {
  Bytes f = inner_.receive(timeout);
  std::lock_guard lock(mutex_);
  frames_.push_back(f);
  return f;
}

std::vector<Bytes> RecordingTransport::frames() const {
  std::lock_guard lock(mutex_);
  return frames_;
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpTransport::connect_loopback(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) io_error("socket");
  auto t = std::make_unique<TcpTransport>(fd);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) io_error("connect");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return t;
}

void TcpTransport::send(std::span<const std::uint8_t> frame) {
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) throw Error(ErrorCode::TransportClosed, "peer closed");
      io_error("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

void TcpTransport::read_exact(std::uint8_t* dst, std::size_t len,
                              std::chrono::steady_clock::time_point deadline) {
  std::size_t got = 0;
  while (got < len) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Error(ErrorCode::Timeout, "no frame within timeout");
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      io_error("poll");
    }
    if (r == 0) throw Error(ErrorCode::Timeout, "no frame within timeout");
    const ssize_t n = ::recv(fd_, dst + got, len - got, 0);
    if (n == 0) throw Error(ErrorCode::TransportClosed, "peer closed");
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("recv");
    }
    got += static_cast<std::size_t>(n);
  }
}

Bytes TcpTransport::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  Bytes frame(wire::kHeaderSize);
  read_exact(frame.data(), frame.size(), deadline);
  const std::size_t len = wire::payload_length(frame);
  frame.resize(wire::kHeaderSize + len);
  if (len > 0) read_exact(frame.data() + wire::kHeaderSize, len, deadline);
  return frame;
}

TcpListener::TcpListener(std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) io_error("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    io_error("bind");
  }
  if (::listen(fd_, 4) != 0) {
    ::close(fd_);
    io_error("listen");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpListener::accept(std::chrono::milliseconds timeout) {
  pollfd p{fd_, POLLIN, 0};
  const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (r < 0) io_error("poll");
  if (r == 0) throw Error(ErrorCode::Timeout, "no connection within timeout");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) io_error("accept");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::make_unique<TcpTransport>(fd);
}

}  // namespace bandana::transport
