#include "sia/link/session.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "sia/metrics/engagement.hpp"

namespace sia::link {

std::string_view link_end_name(LinkEnd end) {
  switch (end) {
    case LinkEnd::session_end: return "session_end";
    case LinkEnd::timeout: return "timeout";
    case LinkEnd::peer_closed: return "peer_closed";
    case LinkEnd::version_mismatch: return "version_mismatch";
    case LinkEnd::handshake_failed: return "handshake_failed";
  }
  return "?";
}

std::optional<double> percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return std::nullopt;
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

using SteadyTime = std::chrono::steady_clock;

class LinkServer {
 public:
  LinkServer(ByteTransport& transport, const pipeline::FrameAnalyzer& analyzer, const events::EventsConfig& config,
             const LinkOptions& options)
      : transport_(transport), analyzer_(analyzer), config_(config), options_(options),
        clock_(options.clock ? options.clock : &steady_) {}

  LinkSessionResult run() {
    last_rx_ = clock_->now();
    std::array<std::uint8_t, 64 * 1024> buf{};
    while (!done_) {
      const Micros waited = clock_->now() - last_rx_;
      if (waited >= options_.silence_timeout) {
        finish_early(LinkEnd::timeout);
        break;
      }
      const auto r = transport_.read_some(buf, options_.silence_timeout - waited);
      if (r.closed) {
        finish_early(LinkEnd::peer_closed);
        break;
      }
      if (r.bytes == 0) continue;
      last_rx_ = clock_->now();
      const auto arrived = SteadyTime::now();
      DecodeResult decoded;
      decoder_.feed(std::span<const std::uint8_t>(buf.data(), r.bytes), decoded);
      for (const auto& e : decoded.errors) {
        result_.stats.decode_errors.push_back(e);
        send_error(std::string(decode_errc_name(e.code)), "stream offset " + std::to_string(e.offset), std::nullopt);
      }
      for (const auto& m : decoded.messages) {
        handle(m, arrived);
        if (done_) break;
      }
    }
    transport_.close();
    return std::move(result_);
  }

 private:
  // A peer that has gone away can no longer hear us; the journal is still finished.
  void send(const Message& m) {
    if (peer_gone_) return;
    try {
      transport_.write(encode(m));
    } catch (const Error&) {
      peer_gone_ = true;
    }
  }

  void send_error(const std::string& code, const std::string& message, std::optional<std::uint32_t> seq) {
    ++result_.stats.errors_sent;
    send(make_error(ErrorPayload{code, message, seq}, out_seq_++, static_cast<std::uint64_t>(clock_->now())));
  }

  void handle(const Message& m, SteadyTime::time_point arrived) {
    ++result_.stats.messages_in;
    if (last_in_seq_ && m.seq <= *last_in_seq_) {
      ++result_.stats.dropped;
      send_error("seq_regression", "seq " + std::to_string(m.seq) + " after " + std::to_string(*last_in_seq_), m.seq);
      return;
    }
    last_in_seq_ = m.seq;
    if (m.version != kProtocolVersion) {
      send_error("version_mismatch", "server speaks version " + std::to_string(kProtocolVersion), m.seq);
      if (!recorder_) {
        result_.end = LinkEnd::version_mismatch;
        done_ = true;
      } else {
        ++result_.stats.dropped;
      }
      return;
    }
    if (!recorder_) {
      handshake(m);
      return;
    }
    try {
      switch (m.type) {
        case MsgType::landmark_frame: on_frame(m, arrived); break;
        case MsgType::frame_blob: on_blob(m); break;
        case MsgType::heartbeat: ++result_.stats.heartbeats; break;
        case MsgType::session_end: on_session_end(m); break;
        case MsgType::error: break;
        case MsgType::hello:
        case MsgType::hello_ack:
        case MsgType::cue:
          ++result_.stats.dropped;
          send_error("unexpected_message", std::string(msg_type_name(m.type)) + " after handshake", m.seq);
          break;
      }
    } catch (const Error& e) {
      ++result_.stats.dropped;
      send_error("bad_payload", e.what(), m.seq);
    }
  }

  void handshake(const Message& m) {
    if (m.type != MsgType::hello) {
      send_error("expected_hello", std::string(msg_type_name(m.type)) + " before HELLO", m.seq);
      result_.end = LinkEnd::handshake_failed;
      done_ = true;
      return;
    }
    Hello hello;
    try {
      hello = parse_hello(m);
    } catch (const Error& e) {
      send_error("bad_payload", e.what(), m.seq);
      result_.end = LinkEnd::handshake_failed;
      done_ = true;
      return;
    }
    meta_ = hello.meta;
    recorder_.emplace(hello.meta, config_, options_.journal_path);
    send(make_hello_ack(out_seq_++, m.timestamp_us));
  }

  void on_frame(const Message& m, SteadyTime::time_point arrived) {
    const auto frame = parse_landmark_frame(m);
    if (const auto last = recorder_->last_frame_timestamp(); last && frame.timestamp <= *last) {
      ++result_.stats.dropped;
      send_error("frame_order", "frame timestamp " + std::to_string(frame.timestamp) + " not after " +
                                    std::to_string(*last), m.seq);
      return;
    }
    std::optional<std::string> blob;
    if (auto it = pending_blobs_.find(frame.timestamp); it != pending_blobs_.end()) {
      blob = it->second;
      pending_blobs_.erase(pending_blobs_.begin(), std::next(it));
    }
    const auto out = recorder_->record_frame(frame, analyzer_.analyze(frame), blob);
    ++result_.stats.frames;
    result_.stats.latency_ms.push_back(std::chrono::duration<double, std::milli>(SteadyTime::now() - arrived).count());
    for (const auto& cue : out.cues) {
      if (cue.suppressed()) continue;
      send(make_cue(cue, out_seq_++));
      ++result_.stats.cues_sent;
    }
  }

  void on_blob(const Message& m) {
    if (!options_.blob_dir) return;
    const auto hash = sha256_hex(m.payload);
    std::filesystem::create_directories(*options_.blob_dir);
    const auto path = *options_.blob_dir / hash;
    if (!std::filesystem::exists(path)) {
      std::ofstream f(path, std::ios::binary);
      f.write(reinterpret_cast<const char*>(m.payload.data()), static_cast<std::streamsize>(m.payload.size()));
      if (!f) throw Error("cannot write blob " + path.string());
    }
    pending_blobs_[static_cast<Micros>(m.timestamp_us)] = hash;
  }

  void on_session_end(const Message& m) {
    const auto end = parse_session_end(m);
    for (const auto& s : end.speech) recorder_->add_speech(s);
    for (const auto& g : end.game_trials) recorder_->add_game_trial(g);
    Micros session_end = 0;
    if (end.session_end) {
      session_end = *end.session_end;
    } else if (const auto last = recorder_->last_frame_timestamp()) {
      session_end = *last + metrics::frame_period(meta_.frame_rate_hz);
    }
    recorder_->finalize(session_end);
    result_.journal = recorder_->journal();
    result_.end = LinkEnd::session_end;
    done_ = true;
  }

  void finish_early(LinkEnd why) {
    result_.end = why;
    if (recorder_ && !recorder_->finalized()) {
      recorder_->finalize(recorder_->last_frame_timestamp().value_or(0));
      result_.journal = recorder_->journal();
    }
    DecodeResult tail;
    decoder_.finish(tail);
    for (const auto& e : tail.errors) result_.stats.decode_errors.push_back(e);
  }

  ByteTransport& transport_;
  const pipeline::FrameAnalyzer& analyzer_;
  const events::EventsConfig& config_;
  const LinkOptions& options_;
  SteadyClock steady_;
  Clock* clock_;

  StreamDecoder decoder_;
  std::optional<pipeline::SessionRecorder> recorder_;
  SessionMeta meta_;
  std::map<Micros, std::string> pending_blobs_;
  std::optional<std::uint32_t> last_in_seq_;
  std::uint32_t out_seq_ = 0;
  Micros last_rx_ = 0;
  bool done_ = false;
  bool peer_gone_ = false;
  LinkSessionResult result_;
};

}  // namespace

LinkSessionResult run_link_session(ByteTransport& transport, const pipeline::FrameAnalyzer& analyzer,
                                   const events::EventsConfig& config, const LinkOptions& options) {
  return LinkServer(transport, analyzer, config, options).run();
}

std::vector<Message> demo_messages(const pipeline::ReplayInput& input, const DemoStreamOptions& options) {
  std::vector<Message> out;
  std::uint32_t seq = 0;
  out.push_back(make_hello(input.meta, seq++, 0));
  std::optional<Micros> last_heartbeat;
  for (const auto& frame : input.frames) {
    if (options.drop_after && frame.timestamp > *options.drop_after) return out;
    if (!last_heartbeat || frame.timestamp - *last_heartbeat >= kHeartbeatInterval) {
      out.push_back(make_heartbeat(seq++, static_cast<std::uint64_t>(frame.timestamp)));
      last_heartbeat = frame.timestamp;
    }
    out.push_back(make_landmark_frame(frame, seq++));
  }
  const Micros end = pipeline::replay_session_end(input);
  out.push_back(make_session_end(SessionEnd{end, input.speech, input.game_trials}, seq++,
                                 static_cast<std::uint64_t>(end)));
  return out;
}

DemoClientResult run_demo_client(ByteTransport& transport, const pipeline::ReplayInput& input,
                                 const DemoStreamOptions& options) {
  DemoClientResult result;
  StreamDecoder decoder;
  std::array<std::uint8_t, 16 * 1024> buf{};
  bool acked = false;

  auto absorb = [&](const DecodeResult& d) {
    for (const auto& m : d.messages) {
      if (m.type == MsgType::hello_ack) acked = true;
      if (m.type == MsgType::cue) result.cues.push_back(parse_cue(m));
      if (m.type == MsgType::error) result.errors.push_back(parse_error(m));
    }
  };
  auto poll = [&](Micros timeout) {
    const auto r = transport.read_some(buf, timeout);
    if (r.bytes > 0) absorb(decoder.feed(std::span<const std::uint8_t>(buf.data(), r.bytes)));
    return r;
  };

  const auto messages = demo_messages(input, options);
  transport.write(encode(messages.front()));
  ++result.messages_sent;
  const auto ack_deadline = std::chrono::steady_clock::now() + std::chrono::microseconds(kLinkTimeout);
  while (!acked) {
    if (std::chrono::steady_clock::now() > ack_deadline) throw Error("link: no HELLO_ACK from server");
    if (poll(100'000).closed) throw Error("link: server closed during handshake");
  }

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 1; i < messages.size(); ++i) {
    const auto& m = messages[i];
    if (options.pace > 0.0 && m.type != MsgType::session_end) {
      const auto due = start + std::chrono::microseconds(
                                   static_cast<Micros>(static_cast<double>(m.timestamp_us) / options.pace));
      std::this_thread::sleep_until(due);
    }
    transport.write(encode(m));
    ++result.messages_sent;
    if (poll(0).closed) return result;
  }
  // Drain cues until the server closes (after SESSION_END or its silence timeout).
  const auto drain_deadline = std::chrono::steady_clock::now() + std::chrono::microseconds(2 * kLinkTimeout);
  while (std::chrono::steady_clock::now() < drain_deadline && !poll(100'000).closed) {
  }
  return result;
}

}  // namespace sia::link
