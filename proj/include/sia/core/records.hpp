#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "sia/core/types.hpp"

namespace sia {

using Json = nlohmann::json;

/// Compact dump with sorted keys; the byte form every payload is written in.
std::string canonical_json(const Json& value);

enum class RecordKind : std::uint8_t {
  session_meta = 1,
  frame_meta = 2,
  landmarks = 3,
  scores = 4,
  event = 5,
  cue = 6,
  pose = 7,
  speech_span = 8,
  annotation = 9,
  game_trial = 10,
};

std::string_view record_kind_name(RecordKind kind);
std::optional<RecordKind> record_kind_from_code(std::uint8_t code);

using Record = std::variant<SessionMeta, FrameMeta, LandmarkFrame, ClassScores, ExpressiveEvent, Cue,
                            HeadPoseSample, SpeechActivitySpan, Annotation, GameTrial>;

RecordKind kind_of(const Record& record);

/// Per-kind ordering key. SessionMeta has none.
std::optional<std::int64_t> ordering_key(const Record& record);

Json to_json(const SessionMeta& v);
Json to_json(const FrameMeta& v);
Json to_json(const LandmarkFrame& v);
Json to_json(const ClassScores& v);
Json to_json(const ExpressiveEvent& v);
Json to_json(const Cue& v);
Json to_json(const HeadPoseSample& v);
Json to_json(const SpeechActivitySpan& v);
Json to_json(const Annotation& v);
Json to_json(const GameTrial& v);
Json to_json(const HighlightClip& v);
Json to_json(const Record& record);
/// canonical_json(to_json(record)); landmark frames skip the intermediate tree.
std::string canonical_payload(const Record& record);

// Strict decoders: unknown or missing keys and violated invariants raise sia::Error.
SessionMeta session_meta_from_json(const Json& j);
FrameMeta frame_meta_from_json(const Json& j);
LandmarkFrame landmark_frame_from_json(const Json& j);
ClassScores class_scores_from_json(const Json& j);
ExpressiveEvent event_from_json(const Json& j);
Cue cue_from_json(const Json& j);
HeadPoseSample pose_from_json(const Json& j);
SpeechActivitySpan speech_span_from_json(const Json& j);
Annotation annotation_from_json(const Json& j);
GameTrial game_trial_from_json(const Json& j);

Record record_from_json(RecordKind kind, const Json& j);

}  // namespace sia
