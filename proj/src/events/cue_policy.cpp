#include "sia/events/cue_policy.hpp"

namespace sia::events {

void CuePolicyConfig::validate() const {
  if (per_label_cooldown < 0) throw Error("per_label_cooldown must be non-negative");
  if (global_rate_limit < 0) throw Error("global_rate_limit must be non-negative");
  if (enabled_labels[label_index(ExpressionLabel::neutral)]) throw Error("neutral cannot be an enabled cue label");
}

CuePolicy::CuePolicy(CuePolicyConfig config) : config_(config) { config_.validate(); }

Cue CuePolicy::decide(ExpressionLabel label, Micros at) {
  if (last_decision_ && at < *last_decision_) throw Error("cue decisions must be made in time order");
  last_decision_ = at;

  Cue cue{label, at, config_.channel, std::nullopt};
  while (!window_.empty() && window_.front() <= at - kRateWindow) window_.pop_front();

  const auto& last = last_issued_[label_index(label)];
  if (label == ExpressionLabel::neutral) {
    cue.suppress_reason = SuppressReason::neutral;
  } else if (!config_.enabled(label)) {
    cue.suppress_reason = SuppressReason::policy_off;
  } else if (last && at - *last < config_.per_label_cooldown) {
    cue.suppress_reason = SuppressReason::cooldown;
  } else if (static_cast<int>(window_.size()) >= config_.global_rate_limit) {
    cue.suppress_reason = SuppressReason::rate_limit;
  } else {
    last_issued_[label_index(label)] = at;
    window_.push_back(at);
  }
  return cue;
}

std::vector<Cue> decide_cues(std::span<const ExpressiveEvent> events, const CuePolicyConfig& config) {
  CuePolicy policy(config);
  std::vector<Cue> out;
  out.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0 && (events[i].start < events[i - 1].start || events[i].confirmed_at < events[i - 1].confirmed_at)) {
      throw Error("events must be sorted by start");
    }
    out.push_back(policy.decide(events[i].label, events[i].confirmed_at));
  }
  return out;
}

}  // namespace sia::events
