#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sia/core/types.hpp"

namespace sia::events {

struct SegmenterConfig {
  double enter_threshold = 0.65;
  double exit_threshold = 0.45;
  Micros min_duration = 500 * kMicrosPerMilli;

  void validate() const;
};

struct SegmenterUpdate {
  /// Events that reached min_duration on this frame; `end` is not final yet.
  std::vector<ExpressiveEvent> confirmed;
  /// Events that terminated on this frame, ordered by label code.
  std::vector<ExpressiveEvent> finished;
};

/// Hysteresis segmentation over a smoothed score stream: one independent
/// idle -> candidate -> event automaton per non-neutral label.
///
/// A label becomes a candidate when its score reaches enter_threshold while
/// being the (first) argmax of the frame. The candidate is confirmed once it
/// has lasted min_duration. Candidate or event ends at the first frame whose
/// score is <= exit_threshold; the event then spans the first candidate frame
/// to the last frame before termination. Unconfirmed candidates are dropped.
class EventSegmenter {
 public:
  explicit EventSegmenter(SegmenterConfig config);

  SegmenterUpdate push(const ClassScores& smoothed);
  /// Closes confirmed events at the last pushed frame and drops candidates.
  SegmenterUpdate finish();

  /// Earliest start among labels currently in candidate or event state.
  std::optional<Micros> earliest_active_start() const;

 private:
  enum class Phase { idle, candidate, event };
  struct Track {
    Phase phase = Phase::idle;
    Micros start = 0;
    Micros confirmed_at = 0;
    double peak = 0.0;
  };

  SegmenterConfig config_;
  std::array<Track, kLabelCount> tracks_{};
  std::optional<Micros> last_timestamp_;
};

/// Batch form: all events of the stream sorted by start, ties by label code.
std::vector<ExpressiveEvent> segment_events(std::span<const ClassScores> smoothed, const SegmenterConfig& config);

}  // namespace sia::events
