#include "sia/events/segmenter.hpp"

#include <algorithm>

namespace sia::events {

void SegmenterConfig::validate() const {
  if (!(enter_threshold > 0.0 && enter_threshold < 1.0)) throw Error("enter_threshold must lie in (0, 1)");
  if (!(exit_threshold > 0.0 && exit_threshold < 1.0)) throw Error("exit_threshold must lie in (0, 1)");
  if (!(exit_threshold < enter_threshold)) throw Error("exit_threshold must be below enter_threshold");
  if (min_duration <= 0) throw Error("min_duration must be positive");
}

EventSegmenter::EventSegmenter(SegmenterConfig config) : config_(config) { config_.validate(); }

SegmenterUpdate EventSegmenter::push(const ClassScores& s) {
  if (last_timestamp_ && s.timestamp <= *last_timestamp_) throw Error("segmenter input must strictly increase in time");
  const std::size_t top =
      static_cast<std::size_t>(std::max_element(s.scores.begin(), s.scores.end()) - s.scores.begin());

  SegmenterUpdate update;
  for (std::size_t k = 1; k < kLabelCount; ++k) {
    Track& tr = tracks_[k];
    const double score = s.scores[k];
    const auto label = static_cast<ExpressionLabel>(k);
    if (tr.phase != Phase::idle && score <= config_.exit_threshold) {
      if (tr.phase == Phase::event) {
        update.finished.push_back(ExpressiveEvent{label, tr.start, *last_timestamp_, tr.confirmed_at, tr.peak});
      }
      tr = Track{};
      continue;
    }
    if (tr.phase == Phase::idle) {
      if (score < config_.enter_threshold || top != k) continue;
      tr = Track{Phase::candidate, s.timestamp, 0, score};
    } else {
      tr.peak = std::max(tr.peak, score);
    }
    if (tr.phase == Phase::candidate && s.timestamp - tr.start >= config_.min_duration) {
      tr.phase = Phase::event;
      tr.confirmed_at = s.timestamp;
      update.confirmed.push_back(ExpressiveEvent{label, tr.start, s.timestamp, s.timestamp, tr.peak});
    }
  }
  last_timestamp_ = s.timestamp;
  return update;
}

SegmenterUpdate EventSegmenter::finish() {
  SegmenterUpdate update;
  for (std::size_t k = 1; k < kLabelCount; ++k) {
    Track& tr = tracks_[k];
    if (tr.phase == Phase::event) {
      update.finished.push_back(
          ExpressiveEvent{static_cast<ExpressionLabel>(k), tr.start, *last_timestamp_, tr.confirmed_at, tr.peak});
    }
    tr = Track{};
  }
  return update;
}

std::optional<Micros> EventSegmenter::earliest_active_start() const {
  std::optional<Micros> earliest;
  for (const auto& tr : tracks_) {
    if (tr.phase != Phase::idle && (!earliest || tr.start < *earliest)) earliest = tr.start;
  }
  return earliest;
}

std::vector<ExpressiveEvent> segment_events(std::span<const ClassScores> smoothed, const SegmenterConfig& config) {
  EventSegmenter seg(config);
  std::vector<ExpressiveEvent> out;
  for (const auto& s : smoothed) {
    auto u = seg.push(s);
    out.insert(out.end(), u.finished.begin(), u.finished.end());
  }
  auto u = seg.finish();
  out.insert(out.end(), u.finished.begin(), u.finished.end());
  std::stable_sort(out.begin(), out.end(), [](const ExpressiveEvent& a, const ExpressiveEvent& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });
  return out;
}

}  // namespace sia::events
