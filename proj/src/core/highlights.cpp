#include "sia/core/highlights.hpp"

#include <algorithm>

namespace sia {

std::vector<HighlightClip> detect_highlights(std::span<const ExpressiveEvent> events, Micros pad,
                                             Micros session_end) {
  if (pad < 0) throw Error("highlight pad must be non-negative");
  std::vector<HighlightClip> clips;
  double best_peak = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (i > 0 && ev.start < events[i - 1].start) throw Error("events must be sorted by start");
    Micros lo = std::clamp<Micros>(ev.start - pad, 0, session_end);
    Micros hi = std::clamp<Micros>(ev.end + pad, 0, session_end);
    if (!clips.empty() && lo <= clips.back().end) {
      auto& clip = clips.back();
      clip.end = std::max(clip.end, hi);
      clip.event_refs.push_back(i);
      if (ev.peak_score > best_peak) {
        best_peak = ev.peak_score;
        clip.dominant_label = ev.label;
      }
      continue;
    }
    clips.push_back(HighlightClip{lo, hi, {i}, ev.label});
    best_peak = ev.peak_score;
  }
  return clips;
}

}  // namespace sia
