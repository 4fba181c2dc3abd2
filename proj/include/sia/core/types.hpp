#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sia {

/// Microseconds since session start. All interval math is done on integers.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerMilli = 1000;
inline constexpr Micros kMicrosPerSecond = 1000000;

/// Base for every error the library raises on bad input or broken contracts.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExpressionLabel : std::uint8_t {
  neutral = 0,
  happiness = 1,
  sadness = 2,
  anger = 3,
  fear = 4,
  surprise = 5,
  disgust = 6,
  contempt = 7,
};

inline constexpr std::size_t kLabelCount = 8;

inline constexpr std::array<ExpressionLabel, kLabelCount> kAllLabels = {
    ExpressionLabel::neutral,  ExpressionLabel::happiness, ExpressionLabel::sadness,
    ExpressionLabel::anger,    ExpressionLabel::fear,      ExpressionLabel::surprise,
    ExpressionLabel::disgust,  ExpressionLabel::contempt};

constexpr std::size_t label_index(ExpressionLabel label) { return static_cast<std::size_t>(label); }

std::string_view label_name(ExpressionLabel label);
std::optional<ExpressionLabel> label_from_code(int code);
/// Throws sia::Error on unknown names.
ExpressionLabel label_from_name(std::string_view name);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr std::size_t kLandmarkCount = 68;
using LandmarkSet = std::array<Point2, kLandmarkCount>;

/// One face observation. `points` is only meaningful when face_present is set.
struct LandmarkFrame {
  Micros timestamp = 0;
  bool face_present = false;
  LandmarkSet points{};
  std::optional<Rect> face_box;

  friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

using ScoreArray = std::array<double, kLabelCount>;

struct ClassScores {
  Micros timestamp = 0;
  ScoreArray scores{};

  double operator[](ExpressionLabel label) const { return scores[label_index(label)]; }
  friend bool operator==(const ClassScores&, const ClassScores&) = default;
};

struct ExpressiveEvent {
  ExpressionLabel label = ExpressionLabel::happiness;
  Micros start = 0;
  Micros end = 0;
  /// First frame at which the candidate had persisted for min_duration.
  Micros confirmed_at = 0;
  double peak_score = 0.0;

  Micros duration() const { return end - start; }
  friend bool operator==(const ExpressiveEvent&, const ExpressiveEvent&) = default;
};

enum class CueChannel : std::uint8_t { visual = 0, audio = 1 };
enum class SuppressReason : std::uint8_t { cooldown = 0, rate_limit = 1, neutral = 2, policy_off = 3 };

std::string_view channel_name(CueChannel channel);
CueChannel channel_from_name(std::string_view name);
std::string_view suppress_reason_name(SuppressReason reason);
SuppressReason suppress_reason_from_name(std::string_view name);

struct Cue {
  ExpressionLabel label = ExpressionLabel::happiness;
  Micros issued_at = 0;
  CueChannel channel = CueChannel::visual;
  std::optional<SuppressReason> suppress_reason;

  bool suppressed() const { return suppress_reason.has_value(); }
  friend bool operator==(const Cue&, const Cue&) = default;
};

struct SpeechActivitySpan {
  std::string speaker_id;
  Micros start = 0;
  Micros end = 0;

  friend bool operator==(const SpeechActivitySpan&, const SpeechActivitySpan&) = default;
};

struct HeadPoseSample {
  Micros timestamp = 0;
  double yaw = 0.0;    // degrees
  double pitch = 0.0;  // degrees
  double roll = 0.0;   // degrees

  friend bool operator==(const HeadPoseSample&, const HeadPoseSample&) = default;
};

struct GameTrial {
  std::string session_id;
  std::int64_t trial_index = 0;
  ExpressionLabel prompted_label = ExpressionLabel::neutral;
  ExpressionLabel responded_label = ExpressionLabel::neutral;

  bool correct() const { return prompted_label == responded_label; }
  friend bool operator==(const GameTrial&, const GameTrial&) = default;
};

struct Annotation {
  std::int64_t id = 0;
  std::string session_id;
  std::string author;
  Micros timestamp_in_session = 0;
  std::string text;
  std::string created_at;  // ISO-8601 UTC wall clock

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct HighlightClip {
  Micros start = 0;
  Micros end = 0;
  std::vector<std::size_t> event_refs;
  ExpressionLabel dominant_label = ExpressionLabel::happiness;

  friend bool operator==(const HighlightClip&, const HighlightClip&) = default;
};

struct SessionMeta {
  std::string session_id;
  std::string subject;
  std::string started_at;  // ISO-8601 UTC wall clock
  double frame_rate_hz = 30.0;
  /// Present only on the trailing record that finalizes a journal.
  std::optional<Micros> session_end;

  friend bool operator==(const SessionMeta&, const SessionMeta&) = default;
};

struct FrameMeta {
  Micros timestamp = 0;
  std::int64_t frame_index = 0;
  /// Lowercase hex content hash of an external frame image under blobs/.
  std::optional<std::string> blob_hash;

  friend bool operator==(const FrameMeta&, const FrameMeta&) = default;
};

}  // namespace sia
