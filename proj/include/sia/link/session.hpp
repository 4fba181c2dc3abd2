#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sia/link/protocol.hpp"
#include "sia/link/transport.hpp"
#include "sia/pipeline/session.hpp"

namespace sia::link {

inline constexpr Micros kHeartbeatInterval = kMicrosPerSecond;
inline constexpr Micros kLinkTimeout = 5 * kMicrosPerSecond;

struct LinkOptions {
  Micros silence_timeout = kLinkTimeout;
  std::optional<std::filesystem::path> journal_path;
  /// FRAME_BLOB payloads are stored here as blobs/<sha256 hex> when set.
  std::optional<std::filesystem::path> blob_dir;
  /// Defaults to the steady clock.
  Clock* clock = nullptr;
};

enum class LinkEnd { session_end, timeout, peer_closed, version_mismatch, handshake_failed };
std::string_view link_end_name(LinkEnd end);

struct LinkStats {
  std::int64_t messages_in = 0;
  std::int64_t frames = 0;
  std::int64_t heartbeats = 0;
  std::int64_t dropped = 0;
  std::int64_t errors_sent = 0;
  std::int64_t cues_sent = 0;
  std::vector<DecodeError> decode_errors;
  /// Landmark-in to cue-decision, one sample per frame, milliseconds.
  std::vector<double> latency_ms;
};

/// Nearest-rank percentile; nullopt for an empty sample.
std::optional<double> percentile(std::vector<double> samples, double p);

struct LinkSessionResult {
  LinkEnd end = LinkEnd::handshake_failed;
  /// Absent when the handshake failed.
  std::optional<SessionJournal> journal;
  LinkStats stats;
};

/// Server side of the link: handshake, then frames through the pipeline until
/// SESSION_END, peer close or silence_timeout. Timeout and close finalize the
/// journal with session_end = last frame timestamp.
LinkSessionResult run_link_session(ByteTransport& transport, const pipeline::FrameAnalyzer& analyzer,
                                   const events::EventsConfig& config, const LinkOptions& options = {});

std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct DemoStreamOptions {
  /// Stop sending (frames and heartbeats) once frame time passes this.
  std::optional<Micros> drop_after;
  /// Speed relative to real time for the live client; 0 sends without pacing.
  double pace = 1.0;
};

/// Client byte stream for a recorded session: HELLO, frames with heartbeats
/// every second of stream time, then SESSION_END (unless dropped).
std::vector<Message> demo_messages(const pipeline::ReplayInput& input, const DemoStreamOptions& options);

struct DemoClientResult {
  std::vector<Cue> cues;
  std::vector<ErrorPayload> errors;
  std::int64_t messages_sent = 0;
};

/// Live client: waits for HELLO_ACK, streams demo_messages paced on the
/// steady clock, then drains replies until the server closes.
DemoClientResult run_demo_client(ByteTransport& transport, const pipeline::ReplayInput& input,
                                 const DemoStreamOptions& options);

}  // namespace sia::link
