#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sia/affect/classifier.hpp"
#include "sia/core/journal.hpp"
#include "sia/synth/templates.hpp"

namespace sia::synth {

struct ScriptSegment {
  ExpressionLabel label = ExpressionLabel::happiness;
  Micros start = 0;
  Micros end = 0;
  double intensity = 1.0;
};

struct PoseSegment {
  Micros start = 0;
  Micros end = 0;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

struct TimeSpan {
  Micros start = 0;
  Micros end = 0;
};

/// A scripted interaction with known ground truth.
struct Scenario {
  std::string session_id = "synth-session";
  std::string subject = "synth-subject";
  std::string started_at = "2024-01-01T00:00:00Z";
  Micros duration = 10 * kMicrosPerSecond;
  double frame_rate_hz = 30.0;
  std::vector<ScriptSegment> script;
  std::vector<TimeSpan> face_gaps;
  std::vector<SpeechActivitySpan> speech;
  std::vector<PoseSegment> pose_script;
  /// Landmark noise standard deviation in interocular units.
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  /// Optional emotion-game results recorded alongside the session.
  std::vector<GameTrial> game_trials;

  /// Throws sia::Error on overlapping same-label segments or out-of-range intervals.
  void validate() const;
};

inline constexpr Micros kRampDuration = 100 * kMicrosPerMilli;
inline constexpr double kPixelsPerUnit = 100.0;
inline constexpr Point2 kImageCenter{320.0, 240.0};

struct GeneratedSession {
  SessionMeta meta;
  std::vector<LandmarkFrame> frames;
  /// Ground-truth head pose for every face-present frame.
  std::vector<HeadPoseSample> poses;
  std::vector<SpeechActivitySpan> speech;
  /// The script as events (label, start, end; peak = intensity).
  std::vector<ExpressiveEvent> ground_truth;
  std::vector<GameTrial> game_trials;
};

/// Deterministic given the scenario (including its seed).
GeneratedSession generate(const Scenario& scenario,
                          const vision::ReferenceFaceModel& model = vision::builtin_reference_model(),
                          const ExpressionTemplates& templates = ExpressionTemplates::builtin());

/// Expression weight of a segment at time t: intensity times 100 ms smoothstep ramps at both edges.
double segment_weight(const ScriptSegment& segment, Micros t);

/// The journal a device would record: SessionMeta, FrameMeta + Landmarks per
/// frame, speech spans, game trials and a finalizing SessionMeta.
SessionJournal recording_journal(const GeneratedSession& session, Micros session_end);

/// per_class_count noisy full-intensity template samples per label, class-major order.
affect::LabeledDataset make_training_set(int per_class_count, double noise_sigma, std::uint64_t seed);

/// Randomized scenario used by end-to-end checks: expressive segments of
/// 1.5-4 s separated by neutral stretches, face gaps only in neutral time.
Scenario random_scenario(std::uint64_t seed, Micros duration = 30 * kMicrosPerSecond, double noise_sigma = 0.002);

Json to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& doc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace sia::synth
