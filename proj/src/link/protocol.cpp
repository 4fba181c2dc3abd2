#include "sia/link/protocol.hpp"

#include <algorithm>
#include <set>

#include "sia/core/bytes.hpp"
#include "sia/core/journal.hpp"

namespace sia::link {

bool is_known_msg_type(std::uint8_t raw) { return raw >= 0x01 && raw <= 0x08; }

std::string_view msg_type_name(MsgType type) {
  switch (type) {
    case MsgType::hello: return "HELLO";
    case MsgType::hello_ack: return "HELLO_ACK";
    case MsgType::landmark_frame: return "LANDMARK_FRAME";
    case MsgType::frame_blob: return "FRAME_BLOB";
    case MsgType::cue: return "CUE";
    case MsgType::heartbeat: return "HEARTBEAT";
    case MsgType::session_end: return "SESSION_END";
    case MsgType::error: return "ERROR";
  }
  return "?";
}

std::string_view decode_errc_name(DecodeErrc code) {
  switch (code) {
    case DecodeErrc::bad_magic: return "bad_magic";
    case DecodeErrc::bad_length: return "bad_length";
    case DecodeErrc::bad_crc: return "bad_crc";
    case DecodeErrc::unknown_msg_type: return "unknown_msg_type";
    case DecodeErrc::truncated: return "truncated";
  }
  return "?";
}

void encode_into(const Message& m, std::vector<std::uint8_t>& out) {
  if (m.payload.size() > kMaxPayload) throw Error("link: payload exceeds 2^24 bytes");
  const std::size_t start = out.size();
  out.reserve(start + kHeaderSize + m.payload.size() + kTrailerSize);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(m.version);
  out.push_back(static_cast<std::uint8_t>(m.type));
  bytes::put_le<std::uint32_t>(out, m.seq);
  bytes::put_le<std::uint64_t>(out, m.timestamp_us);
  bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.payload.size()));
  out.insert(out.end(), m.payload.begin(), m.payload.end());
  const auto crc = crc32(std::span<const std::uint8_t>(out).subspan(start));
  bytes::put_le<std::uint32_t>(out, crc);
}

std::vector<std::uint8_t> encode(const Message& message) {
  std::vector<std::uint8_t> out;
  encode_into(message, out);
  return out;
}

void StreamDecoder::report(DecodeResult& out, DecodeErrc code, std::uint64_t offset) {
  if (quiet_until_good_ || offset < quiet_until_) return;
  out.errors.push_back({code, offset});
}

StreamDecoder::Step StreamDecoder::step(DecodeResult& out, bool final) {
  const std::size_t avail = buffer_.size() - pos_;
  if (avail == 0) return Step::need_more;
  const std::uint64_t offset = base_ + pos_;
  const std::span<const std::uint8_t> p(buffer_.data() + pos_, avail);

  auto incomplete = [&] {
    if (!final) return Step::need_more;
    report(out, DecodeErrc::truncated, offset);
    quiet_until_good_ = true;
    ++pos_;
    return Step::progressed;
  };

  if (p[0] != kMagic0 || (avail >= 2 && p[1] != kMagic1)) {
    report(out, DecodeErrc::bad_magic, offset);
    quiet_until_good_ = true;
    ++pos_;
    return Step::progressed;
  }
  if (avail < kHeaderSize) return incomplete();

  const auto len = bytes::get_le<std::uint32_t>(p.subspan(16));
  if (len > kMaxPayload) {
    report(out, DecodeErrc::bad_length, offset);
    quiet_until_good_ = true;
    ++pos_;
    return Step::progressed;
  }
  const std::size_t extent = kHeaderSize + len + kTrailerSize;
  if (avail < extent) return incomplete();

  const auto stored = bytes::get_le<std::uint32_t>(p.subspan(kHeaderSize + len));
  if (crc32(p.first(kHeaderSize + len)) != stored) {
    report(out, DecodeErrc::bad_crc, offset);
    quiet_until_ = std::max(quiet_until_, offset + extent);
    ++pos_;
    return Step::progressed;
  }
  if (!is_known_msg_type(p[3])) {
    report(out, DecodeErrc::unknown_msg_type, offset);
    pos_ += extent;
    return Step::progressed;
  }
  Message m;
  m.version = p[2];
  m.type = static_cast<MsgType>(p[3]);
  m.seq = bytes::get_le<std::uint32_t>(p.subspan(4));
  m.timestamp_us = bytes::get_le<std::uint64_t>(p.subspan(8));
  m.payload.assign(p.begin() + kHeaderSize, p.begin() + kHeaderSize + len);
  out.messages.push_back(std::move(m));
  pos_ += extent;
  quiet_until_good_ = false;
  quiet_until_ = 0;
  return Step::progressed;
}

void StreamDecoder::compact() {
  if (pos_ == buffer_.size()) {
    base_ += pos_;
    buffer_.clear();
    pos_ = 0;
  } else if (pos_ > (1u << 16) && pos_ * 2 > buffer_.size()) {
    base_ += pos_;
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
}

void StreamDecoder::feed(std::span<const std::uint8_t> bytes, DecodeResult& out) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  while (step(out, false) == Step::progressed) {
  }
  compact();
}

DecodeResult StreamDecoder::feed(std::span<const std::uint8_t> bytes) {
  DecodeResult out;
  feed(bytes, out);
  return out;
}

void StreamDecoder::finish(DecodeResult& out) {
  while (step(out, true) == Step::progressed) {
  }
  compact();
}

DecodeResult StreamDecoder::finish() {
  DecodeResult out;
  finish(out);
  return out;
}

DecodeResult decode_all(std::span<const std::uint8_t> bytes) {
  StreamDecoder d;
  DecodeResult out;
  d.feed(bytes, out);
  d.finish(out);
  return out;
}

std::vector<std::uint8_t> json_payload(const Json& doc) {
  const auto text = canonical_json(doc);
  return {text.begin(), text.end()};
}

Json parse_json_payload(std::span<const std::uint8_t> payload) {
  try {
    return Json::parse(payload.begin(), payload.end());
  } catch (const Json::exception& e) {
    throw Error(std::string("link: payload is not JSON: ") + e.what());
  }
}

namespace {

Message make(MsgType type, std::uint32_t seq, std::uint64_t ts, std::vector<std::uint8_t> payload = {}) {
  Message m;
  m.type = type;
  m.seq = seq;
  m.timestamp_us = ts;
  m.payload = std::move(payload);
  return m;
}

void expect_type(const Message& m, MsgType type) {
  if (m.type != type) {
    throw Error("link: expected " + std::string(msg_type_name(type)) + ", got " + std::string(msg_type_name(m.type)));
  }
}

void check_keys(const Json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw Error(std::string("link: ") + what + " payload must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(std::string("link: unknown key in ") + what + ": " + k);
  }
}

}  // namespace

Message make_hello(const SessionMeta& meta, std::uint32_t seq, std::uint64_t timestamp_us) {
  return make(MsgType::hello, seq, timestamp_us, json_payload(to_json(meta)));
}

Message make_hello_ack(std::uint32_t seq, std::uint64_t timestamp_us) {
  return make(MsgType::hello_ack, seq, timestamp_us, json_payload(Json{{"version", kProtocolVersion}}));
}

Message make_landmark_frame(const LandmarkFrame& frame, std::uint32_t seq) {
  const auto text = canonical_payload(frame);
  return make(MsgType::landmark_frame, seq, static_cast<std::uint64_t>(frame.timestamp), {text.begin(), text.end()});
}

Message make_frame_blob(std::span<const std::uint8_t> blob, Micros frame_timestamp, std::uint32_t seq) {
  return make(MsgType::frame_blob, seq, static_cast<std::uint64_t>(frame_timestamp), {blob.begin(), blob.end()});
}

Message make_cue(const Cue& cue, std::uint32_t seq) {
  return make(MsgType::cue, seq, static_cast<std::uint64_t>(cue.issued_at), json_payload(to_json(cue)));
}

Message make_heartbeat(std::uint32_t seq, std::uint64_t timestamp_us) {
  return make(MsgType::heartbeat, seq, timestamp_us);
}

Message make_session_end(const SessionEnd& end, std::uint32_t seq, std::uint64_t timestamp_us) {
  Json j = Json::object();
  if (end.session_end) j["session_end_us"] = *end.session_end;
  j["speech"] = Json::array();
  for (const auto& s : end.speech) j["speech"].push_back(to_json(s));
  j["game_trials"] = Json::array();
  for (const auto& g : end.game_trials) j["game_trials"].push_back(to_json(g));
  return make(MsgType::session_end, seq, timestamp_us, json_payload(j));
}

Message make_error(const ErrorPayload& error, std::uint32_t seq, std::uint64_t timestamp_us) {
  Json j{{"code", error.code}, {"message", error.message}};
  if (error.seq) j["seq"] = *error.seq;
  return make(MsgType::error, seq, timestamp_us, json_payload(j));
}

Hello parse_hello(const Message& m) {
  expect_type(m, MsgType::hello);
  return Hello{session_meta_from_json(parse_json_payload(m.payload))};
}

LandmarkFrame parse_landmark_frame(const Message& m) {
  expect_type(m, MsgType::landmark_frame);
  return landmark_frame_from_json(parse_json_payload(m.payload));
}

Cue parse_cue(const Message& m) {
  expect_type(m, MsgType::cue);
  return cue_from_json(parse_json_payload(m.payload));
}

SessionEnd parse_session_end(const Message& m) {
  expect_type(m, MsgType::session_end);
  const auto j = parse_json_payload(m.payload);
  check_keys(j, {"session_end_us", "speech", "game_trials"}, "SESSION_END");
  try {
    SessionEnd end;
    if (j.contains("session_end_us")) end.session_end = j.at("session_end_us").get<Micros>();
    if (j.contains("speech")) {
      for (const auto& s : j.at("speech")) end.speech.push_back(speech_span_from_json(s));
    }
    if (j.contains("game_trials")) {
      for (const auto& g : j.at("game_trials")) end.game_trials.push_back(game_trial_from_json(g));
    }
    return end;
  } catch (const Json::exception& e) {
    throw Error(std::string("link: SESSION_END: ") + e.what());
  }
}

ErrorPayload parse_error(const Message& m) {
  expect_type(m, MsgType::error);
  const auto j = parse_json_payload(m.payload);
  check_keys(j, {"code", "message", "seq"}, "ERROR");
  try {
    ErrorPayload e;
    e.code = j.at("code").get<std::string>();
    e.message = j.value("message", std::string{});
    if (j.contains("seq")) e.seq = j.at("seq").get<std::uint32_t>();
    return e;
  } catch (const Json::exception& e) {
    throw Error(std::string("link: ERROR: ") + e.what());
  }
}

}  // namespace sia::link
