#pragma once

#include <optional>
#include <vector>

#include "sia/events/config.hpp"

namespace sia::pipeline {

struct TemporalOutput {
  /// Cues decided on this frame, issued or suppressed.
  std::vector<Cue> cues;
  /// Finished events safe to journal: no later output will start earlier.
  std::vector<ExpressiveEvent> events;
};

/// The sequential stage: EMA smoothing, hysteresis segmentation and the cue
/// policy. A frame without scores (no face) resets the smoother and closes
/// any running event at the previous face frame.
class TemporalStage {
 public:
  explicit TemporalStage(const events::EventsConfig& config);

  TemporalOutput push(Micros timestamp, const std::optional<ClassScores>& raw);
  TemporalOutput finish();

 private:
  void release(TemporalOutput& out, bool all);

  events::ScoreSmoother smoother_;
  events::EventSegmenter segmenter_;
  events::CuePolicy policy_;
  bool segmenter_open_ = false;
  std::vector<ExpressiveEvent> pending_;
};

}  // namespace sia::pipeline
