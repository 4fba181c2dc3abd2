#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>

#include "sia/core/types.hpp"

namespace sia::link {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Micros now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  Micros now() const override;
};

/// Test clock; only moves when advanced (loopback reads advance it on timeout).
class ManualClock final : public Clock {
 public:
  Micros now() const override;
  void advance(Micros d);

 private:
  mutable std::mutex mu_;
  Micros now_ = 0;
};

struct ReadResult {
  std::size_t bytes = 0;
  /// Peer closed and nothing is left to read.
  bool closed = false;
};

/// Ordered, reliable byte stream.
class ByteTransport {
 public:
  virtual ~ByteTransport() = default;
  /// Blocks up to `timeout`; bytes == 0 and !closed means the timeout expired.
  virtual ReadResult read_some(std::span<std::uint8_t> buffer, Micros timeout) = 0;
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  virtual void close() = 0;
};

/// In-memory transport. A ManualClock makes an empty read return at once
/// after advancing the clock by the timeout, so timeouts are deterministic.
class LoopbackTransport final : public ByteTransport {
 public:
  struct Pipe {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::uint8_t> data;
    bool closed = false;
  };

  LoopbackTransport(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out, ManualClock* clock);
  ~LoopbackTransport() override;

  ReadResult read_some(std::span<std::uint8_t> buffer, Micros timeout) override;
  void write(std::span<const std::uint8_t> bytes) override;
  void close() override;

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
  ManualClock* clock_;
};

std::pair<std::unique_ptr<LoopbackTransport>, std::unique_ptr<LoopbackTransport>> make_loopback_pair(
    ManualClock* clock = nullptr);

class TcpTransport final : public ByteTransport {
 public:
  explicit TcpTransport(int fd);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  ReadResult read_some(std::span<std::uint8_t> buffer, Micros timeout) override;
  void write(std::span<const std::uint8_t> bytes) override;
  void close() override;

 private:
  int fd_;
};

class TcpListener {
 public:
  /// Port 0 picks a free port; see port().
  TcpListener(const std::string& bind_address, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Throws sia::Error if no client connects within `timeout`.
  std::unique_ptr<TcpTransport> accept(Micros timeout);

 private:
  int fd_;
  std::uint16_t port_;
};

std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port);

}  // namespace sia::link
