#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sia/core/journal.hpp"
#include "sia/core/records.hpp"
#include "sia/metrics/intervals.hpp"

namespace sia::metrics {

/// Spans of session time during which a face was tracked.
struct FaceVisibilityTimeline {
  SpanList spans;

  /// Throws sia::Error unless spans are sorted, disjoint and inside [0, session_end].
  void validate(Micros session_end) const;
};

/// Each face-present frame covers [t_i, t_{i+1}); the last frame covers one
/// nominal frame period. Everything is clipped to [0, session_end].
FaceVisibilityTimeline visibility_timeline(std::span<const LandmarkFrame> frames, Micros frame_period,
                                           Micros session_end);

/// Nominal frame period in microseconds for a frame rate.
Micros frame_period(double frame_rate_hz);

double face_in_view_fraction(const FaceVisibilityTimeline& timeline, Micros session_end);

/// Fraction of the speaker's talking time covered by the timeline; absent
/// when there is no talking time.
std::optional<double> gaze_while_speaking(const FaceVisibilityTimeline& timeline,
                                          std::span<const SpeechActivitySpan> speech);

inline constexpr std::size_t kYawBins = 9;
inline constexpr double kFacingYawDeg = 15.0;

struct PoseHabits {
  double mean_abs_yaw = 0.0;
  /// 20-degree bins over [-90, 90]; the last bin is closed at 90.
  std::array<std::int64_t, kYawBins> yaw_histogram{};
  double facing_fraction = 0.0;
  std::int64_t sample_count = 0;

  bool empty() const { return sample_count == 0; }
};

PoseHabits pose_habits(std::span<const HeadPoseSample> poses);

/// Ordinary least squares slope of values against 0..n-1; absent for n < 2.
std::optional<double> ols_slope(std::span<const double> values);
/// OLS slope over explicit x positions; absent for fewer than two points.
std::optional<double> ols_slope(std::span<const double> xs, std::span<const double> ys);

struct GameAccuracyTrend {
  std::vector<double> accuracies;
  std::optional<double> slope;
};

/// One inner vector per session in session order. Throws on a session with no trials.
GameAccuracyTrend game_accuracy_trend(std::span<const std::vector<GameTrial>> sessions);

struct CueCounts {
  std::int64_t issued = 0;
  std::int64_t suppressed = 0;
};

struct EngagementMetrics {
  std::string session_id;
  std::string subject;
  std::string started_at;
  Micros session_end = 0;
  std::int64_t frame_count = 0;
  std::int64_t face_frame_count = 0;
  double face_in_view_fraction = 0.0;
  FaceVisibilityTimeline timeline;
  /// Per speaker: face-in-view during speech, and the stricter |yaw| <= 15 variant.
  std::map<std::string, std::optional<double>> gaze_while_speaking;
  std::map<std::string, std::optional<double>> gaze_while_speaking_facing;
  /// All speakers pooled.
  std::optional<double> gaze_while_speaking_all;
  PoseHabits pose;
  std::array<CueCounts, kLabelCount> cue_counts{};
  std::array<std::int64_t, kLabelCount> event_counts{};
  std::int64_t game_trials = 0;
  std::optional<double> game_accuracy;
};

/// Session end declared by the journal, else last frame + one frame period.
Micros session_end_of(const SessionJournal& journal);

/// Throws JournalError when the journal lacks its SessionMeta.
EngagementMetrics session_summary(const SessionJournal& journal);

Json to_json(const PoseHabits& pose);
Json to_json(const EngagementMetrics& metrics);

}  // namespace sia::metrics
