#pragma once

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "sia/core/types.hpp"

namespace sia::events {

inline constexpr Micros kRateWindow = 60 * kMicrosPerSecond;

/// How obtrusive the wearer-facing cues may be. Every knob is configurable.
struct CuePolicyConfig {
  Micros per_label_cooldown = 5 * kMicrosPerSecond;
  /// Maximum issued cues in any trailing 60 s window.
  int global_rate_limit = 12;
  CueChannel channel = CueChannel::visual;
  /// Indexed by label code; neutral is never enabled.
  std::array<bool, kLabelCount> enabled_labels = {false, true, true, true, true, true, true, true};

  void validate() const;
  bool enabled(ExpressionLabel label) const { return enabled_labels[label_index(label)]; }
};

/// Streaming cue arbitration. Checks run in order neutral, policy_off,
/// cooldown, rate_limit; suppressed cues are returned, never dropped.
class CuePolicy {
 public:
  explicit CuePolicy(CuePolicyConfig config);

  /// Decision times must be non-decreasing.
  Cue decide(ExpressionLabel label, Micros at);

 private:
  CuePolicyConfig config_;
  std::array<std::optional<Micros>, kLabelCount> last_issued_{};
  std::deque<Micros> window_;
  std::optional<Micros> last_decision_;
};

/// One cue per event, issued at the event's confirmation time. Throws on
/// events that are not sorted by start.
std::vector<Cue> decide_cues(std::span<const ExpressiveEvent> events, const CuePolicyConfig& config);

}  // namespace sia::events
