#include "sia/core/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <set>

namespace sia {

namespace {

// Shortest round-trip digits; integral values keep a ".0" so they parse back as floats.
void append_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof(buf), x).ptr;
  out.append(buf, end);
  if (std::find_if(buf, end, [](char c) { return c == '.' || c == 'e'; }) == end) out += ".0";
}

void append_string(std::string& out, const std::string& text) {
  const bool plain = std::all_of(text.begin(), text.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x20 && u < 0x80 && c != '"' && c != '\\';
  });
  if (!plain) {
    out += Json(text).dump();
    return;
  }
  out += '"';
  out += text;
  out += '"';
}

void append_json(std::string& out, const Json& v) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        append_string(out, key);
        out += ':';
        append_json(out, item);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        append_json(out, v[i]);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: append_number(out, v.get<double>()); break;
    case Json::value_t::string: append_string(out, v.get_ref<const std::string&>()); break;
    case Json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    default: out += v.dump(); break;
  }
}

}  // namespace

std::string canonical_json(const Json& value) {
  std::string out;
  append_json(out, value);
  return out;
}

std::string_view record_kind_name(RecordKind kind) {
  switch (kind) {
    case RecordKind::session_meta: return "SessionMeta";
    case RecordKind::frame_meta: return "FrameMeta";
    case RecordKind::landmarks: return "Landmarks";
    case RecordKind::scores: return "Scores";
    case RecordKind::event: return "Event";
    case RecordKind::cue: return "Cue";
    case RecordKind::pose: return "Pose";
    case RecordKind::speech_span: return "SpeechSpan";
    case RecordKind::annotation: return "Annotation";
    case RecordKind::game_trial: return "GameTrial";
  }
  return "Unknown";
}

std::optional<RecordKind> record_kind_from_code(std::uint8_t code) {
  if (code < 1 || code > 10) return std::nullopt;
  return static_cast<RecordKind>(code);
}

RecordKind kind_of(const Record& record) {
  return static_cast<RecordKind>(record.index() + 1);
}

std::optional<std::int64_t> ordering_key(const Record& record) {
  struct Visitor {
    std::optional<std::int64_t> operator()(const SessionMeta&) const { return std::nullopt; }
    std::optional<std::int64_t> operator()(const FrameMeta& v) const { return v.timestamp; }
    std::optional<std::int64_t> operator()(const LandmarkFrame& v) const { return v.timestamp; }
    std::optional<std::int64_t> operator()(const ClassScores& v) const { return v.timestamp; }
    std::optional<std::int64_t> operator()(const ExpressiveEvent& v) const { return v.start; }
    std::optional<std::int64_t> operator()(const Cue& v) const { return v.issued_at; }
    std::optional<std::int64_t> operator()(const HeadPoseSample& v) const { return v.timestamp; }
    std::optional<std::int64_t> operator()(const SpeechActivitySpan& v) const { return v.start; }
    std::optional<std::int64_t> operator()(const Annotation& v) const { return v.id; }
    std::optional<std::int64_t> operator()(const GameTrial& v) const { return v.trial_index; }
  };
  return std::visit(Visitor{}, record);
}

namespace {

// Reads fields out of a JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const Json& j, std::string_view what) : j_(j), what_(what) {
    if (!j.is_object()) fail("expected a JSON object");
  }

  const Json& required(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) fail(std::string("missing field '") + key + "'");
    seen_.insert(key);
    return *it;
  }

  const Json* optional(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::int64_t integer(const char* key) {
    const Json& v = required(key);
    if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  double real(const char* key) { return as_real(required(key), key); }

  double as_real(const Json& v, const char* key) {
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(std::string("field '") + key + "' must be finite");
    return d;
  }

  std::string string(const char* key) {
    const Json& v = required(key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const char* key) {
    const Json& v = required(key);
    if (!v.is_boolean()) fail(std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }

  ExpressionLabel label(const char* key) {
    auto code = label_from_code(static_cast<int>(integer(key)));
    if (!code) fail(std::string("field '") + key + "' is not a label code");
    return *code;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail("unknown field '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(std::string(what_) + ": " + msg);
  }

 private:
  const Json& j_;
  std::string_view what_;
  std::set<std::string, std::less<>> seen_;
};

Json rect_to_json(const Rect& r) {
  return Json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

}  // namespace

Json to_json(const SessionMeta& v) {
  Json j{{"session_id", v.session_id},
         {"subject", v.subject},
         {"started_at", v.started_at},
         {"frame_rate_hz", v.frame_rate_hz}};
  if (v.session_end) j["session_end_us"] = *v.session_end;
  return j;
}

Json to_json(const FrameMeta& v) {
  Json j{{"timestamp_us", v.timestamp}, {"frame_index", v.frame_index}};
  if (v.blob_hash) j["blob_hash"] = *v.blob_hash;
  return j;
}

namespace {

std::string landmark_payload(const LandmarkFrame& v) {
  std::string out;
  out.reserve(v.face_present ? 2 * kLandmarkCount * 20 + 96 : 64);
  out += '{';
  if (v.face_box) {
    out += "\"face_box\":";
    out += canonical_json(rect_to_json(*v.face_box));
    out += ',';
  }
  out += v.face_present ? "\"face_present\":true" : "\"face_present\":false";
  if (v.face_present) {
    out += ",\"points\":[";
    for (std::size_t i = 0; i < v.points.size(); ++i) {
      if (i > 0) out += ',';
      append_number(out, v.points[i].x);
      out += ',';
      append_number(out, v.points[i].y);
    }
    out += ']';
  }
  out += ",\"timestamp_us\":";
  out += std::to_string(v.timestamp);
  out += '}';
  return out;
}

}  // namespace

std::string canonical_payload(const Record& record) {
  if (const auto* f = std::get_if<LandmarkFrame>(&record)) return landmark_payload(*f);
  return canonical_json(to_json(record));
}

Json to_json(const LandmarkFrame& v) {
  Json j{{"timestamp_us", v.timestamp}, {"face_present", v.face_present}};
  if (v.face_present) {
    Json pts = Json::array();
    for (const auto& p : v.points) {
      pts.push_back(p.x);
      pts.push_back(p.y);
    }
    j["points"] = std::move(pts);
  }
  if (v.face_box) j["face_box"] = rect_to_json(*v.face_box);
  return j;
}

Json to_json(const ClassScores& v) {
  return Json{{"timestamp_us", v.timestamp}, {"scores", v.scores}};
}

Json to_json(const ExpressiveEvent& v) {
  return Json{{"label", label_index(v.label)},
              {"start_us", v.start},
              {"end_us", v.end},
              {"confirmed_at_us", v.confirmed_at},
              {"peak_score", v.peak_score}};
}

Json to_json(const Cue& v) {
  Json j{{"label", label_index(v.label)},
         {"issued_at_us", v.issued_at},
         {"channel", channel_name(v.channel)},
         {"suppressed", v.suppressed()}};
  if (v.suppress_reason) j["suppress_reason"] = suppress_reason_name(*v.suppress_reason);
  return j;
}

Json to_json(const HeadPoseSample& v) {
  return Json{{"timestamp_us", v.timestamp}, {"yaw", v.yaw}, {"pitch", v.pitch}, {"roll", v.roll}};
}

Json to_json(const SpeechActivitySpan& v) {
  return Json{{"speaker_id", v.speaker_id}, {"start_us", v.start}, {"end_us", v.end}};
}

Json to_json(const Annotation& v) {
  return Json{{"id", v.id},
              {"session_id", v.session_id},
              {"author", v.author},
              {"timestamp_in_session_us", v.timestamp_in_session},
              {"text", v.text},
              {"created_at", v.created_at}};
}

Json to_json(const GameTrial& v) {
  return Json{{"session_id", v.session_id},
              {"trial_index", v.trial_index},
              {"prompted_label", label_index(v.prompted_label)},
              {"responded_label", label_index(v.responded_label)},
              {"correct", v.correct()}};
}

Json to_json(const HighlightClip& v) {
  return Json{{"start_us", v.start},
              {"end_us", v.end},
              {"event_refs", v.event_refs},
              {"dominant_label", label_name(v.dominant_label)}};
}

Json to_json(const Record& record) {
  return std::visit([](const auto& v) { return to_json(v); }, record);
}

SessionMeta session_meta_from_json(const Json& j) {
  Fields f(j, "SessionMeta");
  SessionMeta v;
  v.session_id = f.string("session_id");
  v.subject = f.string("subject");
  v.started_at = f.string("started_at");
  v.frame_rate_hz = f.real("frame_rate_hz");
  if (v.frame_rate_hz <= 0) f.fail("frame_rate_hz must be positive");
  if (f.optional("session_end_us")) v.session_end = f.integer("session_end_us");
  f.finish();
  return v;
}

FrameMeta frame_meta_from_json(const Json& j) {
  Fields f(j, "FrameMeta");
  FrameMeta v;
  v.timestamp = f.integer("timestamp_us");
  v.frame_index = f.integer("frame_index");
  if (f.optional("blob_hash")) v.blob_hash = f.string("blob_hash");
  f.finish();
  return v;
}

LandmarkFrame landmark_frame_from_json(const Json& j) {
  Fields f(j, "LandmarkFrame");
  LandmarkFrame v;
  v.timestamp = f.integer("timestamp_us");
  if (v.timestamp < 0) f.fail("timestamp_us must be non-negative");
  v.face_present = f.boolean("face_present");
  const Json* pts = f.optional("points");
  if (v.face_present) {
    if (!pts || !pts->is_array() || pts->size() != 2 * kLandmarkCount) {
      f.fail("face_present frames need exactly 68 points");
    }
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      v.points[i].x = f.as_real((*pts)[2 * i], "points");
      v.points[i].y = f.as_real((*pts)[2 * i + 1], "points");
    }
  } else if (pts) {
    f.fail("points must be absent when face_present is false");
  }
  if (const Json* box = f.optional("face_box")) {
    Fields b(*box, "face_box");
    v.face_box = Rect{b.real("x"), b.real("y"), b.real("width"), b.real("height")};
    b.finish();
  }
  f.finish();
  return v;
}

ClassScores class_scores_from_json(const Json& j) {
  Fields f(j, "ClassScores");
  ClassScores v;
  v.timestamp = f.integer("timestamp_us");
  const Json& s = f.required("scores");
  if (!s.is_array() || s.size() != kLabelCount) f.fail("scores must hold 8 numbers");
  for (std::size_t i = 0; i < kLabelCount; ++i) v.scores[i] = f.as_real(s[i], "scores");
  f.finish();
  return v;
}

ExpressiveEvent event_from_json(const Json& j) {
  Fields f(j, "ExpressiveEvent");
  ExpressiveEvent v;
  v.label = f.label("label");
  if (v.label == ExpressionLabel::neutral) f.fail("events are never neutral");
  v.start = f.integer("start_us");
  v.end = f.integer("end_us");
  v.confirmed_at = f.integer("confirmed_at_us");
  v.peak_score = f.real("peak_score");
  if (v.end < v.start) f.fail("end_us precedes start_us");
  f.finish();
  return v;
}

Cue cue_from_json(const Json& j) {
  Fields f(j, "Cue");
  Cue v;
  v.label = f.label("label");
  v.issued_at = f.integer("issued_at_us");
  v.channel = channel_from_name(f.string("channel"));
  bool suppressed = f.boolean("suppressed");
  if (f.optional("suppress_reason")) v.suppress_reason = suppress_reason_from_name(f.string("suppress_reason"));
  if (suppressed != v.suppressed()) f.fail("suppressed flag disagrees with suppress_reason");
  f.finish();
  return v;
}

HeadPoseSample pose_from_json(const Json& j) {
  Fields f(j, "HeadPoseSample");
  HeadPoseSample v;
  v.timestamp = f.integer("timestamp_us");
  v.yaw = f.real("yaw");
  v.pitch = f.real("pitch");
  v.roll = f.real("roll");
  f.finish();
  return v;
}

SpeechActivitySpan speech_span_from_json(const Json& j) {
  Fields f(j, "SpeechActivitySpan");
  SpeechActivitySpan v;
  v.speaker_id = f.string("speaker_id");
  v.start = f.integer("start_us");
  v.end = f.integer("end_us");
  if (v.start >= v.end) f.fail("start_us must precede end_us");
  f.finish();
  return v;
}

Annotation annotation_from_json(const Json& j) {
  Fields f(j, "Annotation");
  Annotation v;
  v.id = f.integer("id");
  v.session_id = f.string("session_id");
  v.author = f.string("author");
  v.timestamp_in_session = f.integer("timestamp_in_session_us");
  v.text = f.string("text");
  v.created_at = f.string("created_at");
  f.finish();
  return v;
}

GameTrial game_trial_from_json(const Json& j) {
  Fields f(j, "GameTrial");
  GameTrial v;
  v.session_id = f.string("session_id");
  v.trial_index = f.integer("trial_index");
  v.prompted_label = f.label("prompted_label");
  v.responded_label = f.label("responded_label");
  if (f.boolean("correct") != v.correct()) f.fail("correct flag disagrees with labels");
  f.finish();
  return v;
}

Record record_from_json(RecordKind kind, const Json& j) {
  switch (kind) {
    case RecordKind::session_meta: return session_meta_from_json(j);
    case RecordKind::frame_meta: return frame_meta_from_json(j);
    case RecordKind::landmarks: return landmark_frame_from_json(j);
    case RecordKind::scores: return class_scores_from_json(j);
    case RecordKind::event: return event_from_json(j);
    case RecordKind::cue: return cue_from_json(j);
    case RecordKind::pose: return pose_from_json(j);
    case RecordKind::speech_span: return speech_span_from_json(j);
    case RecordKind::annotation: return annotation_from_json(j);
    case RecordKind::game_trial: return game_trial_from_json(j);
  }
  throw Error("unknown record kind");
}

}  // namespace sia
