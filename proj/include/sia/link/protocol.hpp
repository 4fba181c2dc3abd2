#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sia/core/records.hpp"
#include "sia/core/types.hpp"

namespace sia::link {

inline constexpr std::uint8_t kMagic0 = 0xA5;
inline constexpr std::uint8_t kMagic1 = 0x47;
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 20;
inline constexpr std::size_t kTrailerSize = 4;
inline constexpr std::size_t kMaxPayload = std::size_t{1} << 24;

enum class MsgType : std::uint8_t {
  hello = 0x01,
  hello_ack = 0x02,
  landmark_frame = 0x03,
  frame_blob = 0x04,
  cue = 0x05,
  heartbeat = 0x06,
  session_end = 0x07,
  error = 0x08,
};

bool is_known_msg_type(std::uint8_t raw);
std::string_view msg_type_name(MsgType type);

struct Message {
  std::uint8_t version = kProtocolVersion;
  MsgType type = MsgType::heartbeat;
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Full wire frame. Throws sia::Error if the payload exceeds kMaxPayload.
std::vector<std::uint8_t> encode(const Message& message);
void encode_into(const Message& message, std::vector<std::uint8_t>& out);

enum class DecodeErrc { bad_magic, bad_length, bad_crc, unknown_msg_type, truncated };
std::string_view decode_errc_name(DecodeErrc code);

struct DecodeError {
  DecodeErrc code;
  /// Absolute stream offset of the frame (or garbage byte) that failed.
  std::uint64_t offset;

  friend bool operator==(const DecodeError&, const DecodeError&) = default;
};

struct DecodeResult {
  std::vector<Message> messages;
  std::vector<DecodeError> errors;
};

/// Incremental frame parser.
///
/// After an error the parser rescans from the next byte, so intact frames
/// that follow are still recovered. Further errors stay quiet until a good
/// frame is found or the failed frame's declared extent has been passed, so
/// one corruption yields one report.
class StreamDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes, DecodeResult& out);
  DecodeResult feed(std::span<const std::uint8_t> bytes);

  /// End of stream: an incomplete frame is reported as truncated and the
  /// remaining bytes are rescanned for complete frames.
  void finish(DecodeResult& out);
  DecodeResult finish();

  std::size_t buffered() const { return buffer_.size() - pos_; }
  std::uint64_t consumed() const { return base_ + pos_; }

 private:
  enum class Step { progressed, need_more };
  Step step(DecodeResult& out, bool final);
  void report(DecodeResult& out, DecodeErrc code, std::uint64_t offset);
  void compact();

  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
  std::uint64_t base_ = 0;
  std::uint64_t quiet_until_ = 0;
  bool quiet_until_good_ = false;
};

/// One-shot decode of a complete byte string.
DecodeResult decode_all(std::span<const std::uint8_t> bytes);

// Payload schemas. Every JSON payload is canonical (sorted keys, compact).

struct Hello {
  SessionMeta meta;
};

struct SessionEnd {
  std::optional<Micros> session_end;
  std::vector<SpeechActivitySpan> speech;
  std::vector<GameTrial> game_trials;
};

struct ErrorPayload {
  std::string code;
  std::string message;
  std::optional<std::uint32_t> seq;
};

std::vector<std::uint8_t> json_payload(const Json& doc);
/// Throws sia::Error when the payload is not a JSON document.
Json parse_json_payload(std::span<const std::uint8_t> payload);

Message make_hello(const SessionMeta& meta, std::uint32_t seq, std::uint64_t timestamp_us);
Message make_hello_ack(std::uint32_t seq, std::uint64_t timestamp_us);
Message make_landmark_frame(const LandmarkFrame& frame, std::uint32_t seq);
Message make_frame_blob(std::span<const std::uint8_t> blob, Micros frame_timestamp, std::uint32_t seq);
Message make_cue(const Cue& cue, std::uint32_t seq);
Message make_heartbeat(std::uint32_t seq, std::uint64_t timestamp_us);
Message make_session_end(const SessionEnd& end, std::uint32_t seq, std::uint64_t timestamp_us);
Message make_error(const ErrorPayload& error, std::uint32_t seq, std::uint64_t timestamp_us);

Hello parse_hello(const Message& message);
LandmarkFrame parse_landmark_frame(const Message& message);
Cue parse_cue(const Message& message);
SessionEnd parse_session_end(const Message& message);
ErrorPayload parse_error(const Message& message);

}  // namespace sia::link
