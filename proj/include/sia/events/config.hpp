#pragma once

#include "sia/core/records.hpp"
#include "sia/events/cue_policy.hpp"
#include "sia/events/segmenter.hpp"
#include "sia/events/smoothing.hpp"

namespace sia::events {

struct EventsConfig {
  SmoothingConfig smoothing;
  SegmenterConfig segmenter;
  CuePolicyConfig cues;

  void validate() const;
};

/// The `events` config section. Durations are milliseconds on the wire.
/// Missing keys keep their defaults; unknown keys are rejected.
EventsConfig events_config_from_json(const Json& section);
Json to_json(const EventsConfig& config);

}  // namespace sia::events
