#include "sia/pipeline/temporal.hpp"

#include <algorithm>

namespace sia::pipeline {

TemporalStage::TemporalStage(const events::EventsConfig& config)
    : smoother_(config.smoothing), segmenter_(config.segmenter), policy_(config.cues) {}

TemporalOutput TemporalStage::push(Micros /*timestamp*/, const std::optional<ClassScores>& raw) {
  TemporalOutput out;
  if (!raw) {
    smoother_.reset();
    if (segmenter_open_) {
      auto u = segmenter_.finish();
      pending_.insert(pending_.end(), u.finished.begin(), u.finished.end());
      segmenter_open_ = false;
    }
    release(out, false);
    return out;
  }
  auto u = segmenter_.push(smoother_.push(*raw));
  segmenter_open_ = true;
  for (const auto& ev : u.confirmed) out.cues.push_back(policy_.decide(ev.label, ev.confirmed_at));
  pending_.insert(pending_.end(), u.finished.begin(), u.finished.end());
  release(out, false);
  return out;
}

TemporalOutput TemporalStage::finish() {
  TemporalOutput out;
  auto u = segmenter_.finish();
  pending_.insert(pending_.end(), u.finished.begin(), u.finished.end());
  segmenter_open_ = false;
  release(out, true);
  return out;
}

void TemporalStage::release(TemporalOutput& out, bool all) {
  if (pending_.empty()) return;
  std::sort(pending_.begin(), pending_.end(), [](const ExpressiveEvent& a, const ExpressiveEvent& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });
  const auto active = segmenter_.earliest_active_start();
  auto split = pending_.begin();
  while (split != pending_.end() && (all || !active || split->start < *active)) ++split;
  out.events.insert(out.events.end(), pending_.begin(), split);
  pending_.erase(pending_.begin(), split);
}

}  // namespace sia::pipeline
