#include "sia/link/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>

namespace sia::link {

Micros SteadyClock::now() const {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Micros ManualClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

void ManualClock::advance(Micros d) {
  std::lock_guard lock(mu_);
  now_ += d;
}

LoopbackTransport::LoopbackTransport(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out, ManualClock* clock)
    : in_(std::move(in)), out_(std::move(out)), clock_(clock) {}

LoopbackTransport::~LoopbackTransport() { close(); }

ReadResult LoopbackTransport::read_some(std::span<std::uint8_t> buffer, Micros timeout) {
  std::unique_lock lock(in_->mu);
  if (in_->data.empty() && !in_->closed) {
    if (clock_) {
      clock_->advance(timeout);
      return {};
    }
    in_->cv.wait_for(lock, std::chrono::microseconds(timeout),
                     [&] { return !in_->data.empty() || in_->closed; });
  }
  if (in_->data.empty()) return {0, in_->closed};
  const std::size_t n = std::min(buffer.size(), in_->data.size());
  std::copy_n(in_->data.begin(), n, buffer.begin());
  in_->data.erase(in_->data.begin(), in_->data.begin() + static_cast<std::ptrdiff_t>(n));
  return {n, false};
}

void LoopbackTransport::write(std::span<const std::uint8_t> bytes) {
  {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw Error("loopback: write after close");
    out_->data.insert(out_->data.end(), bytes.begin(), bytes.end());
  }
  out_->cv.notify_all();
}

void LoopbackTransport::close() {
  for (auto* pipe : {in_.get(), out_.get()}) {
    {
      std::lock_guard lock(pipe->mu);
      pipe->closed = true;
    }
    pipe->cv.notify_all();
  }
}

std::pair<std::unique_ptr<LoopbackTransport>, std::unique_ptr<LoopbackTransport>> make_loopback_pair(
    ManualClock* clock) {
  auto a_to_b = std::make_shared<LoopbackTransport::Pipe>();
  auto b_to_a = std::make_shared<LoopbackTransport::Pipe>();
  return {std::make_unique<LoopbackTransport>(b_to_a, a_to_b, clock),
          std::make_unique<LoopbackTransport>(a_to_b, b_to_a, clock)};
}

namespace {

[[noreturn]] void throw_errno(const std::string& what) { throw Error(what + ": " + std::strerror(errno)); }

int poll_timeout_ms(Micros timeout) {
  if (timeout <= 0) return 0;
  return static_cast<int>(std::min<Micros>((timeout + 999) / 1000, 1 << 30));
}

}  // namespace

TcpTransport::TcpTransport(int fd) : fd_(fd) {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() { close(); }

ReadResult TcpTransport::read_some(std::span<std::uint8_t> buffer, Micros timeout) {
  if (fd_ < 0) return {0, true};
  pollfd pfd{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&pfd, 1, poll_timeout_ms(timeout));
  } while (rc < 0 && errno == EINTR);
  if (rc < 0) throw_errno("tcp: poll");
  if (rc == 0) return {};
  ssize_t n;
  do {
    n = ::recv(fd_, buffer.data(), buffer.size(), 0);
  } while (n < 0 && errno == EINTR);
  if (n < 0) {
    if (errno == ECONNRESET) return {0, true};
    throw_errno("tcp: recv");
  }
  if (n == 0) return {0, true};
  return {static_cast<std::size_t>(n), false};
}

void TcpTransport::write(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("tcp: send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

void TcpTransport::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(const std::string& bind_address, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("tcp: socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw Error("tcp: bad bind address " + bind_address);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 4) < 0) {
    const int saved = errno;
    ::close(fd_);
    errno = saved;
    throw_errno("tcp: bind " + bind_address + ":" + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpListener::accept(Micros timeout) {
  pollfd pfd{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&pfd, 1, poll_timeout_ms(timeout));
  } while (rc < 0 && errno == EINTR);
  if (rc < 0) throw_errno("tcp: poll");
  if (rc == 0) throw Error("tcp: no client connected before timeout");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw_errno("tcp: accept");
  return std::make_unique<TcpTransport>(fd);
}

std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res); rc != 0) {
    throw Error("tcp: resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw Error("tcp: cannot connect to " + host + ":" + std::to_string(port));
  return std::make_unique<TcpTransport>(fd);
}

}  // namespace sia::link
