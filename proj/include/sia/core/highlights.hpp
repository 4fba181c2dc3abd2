#pragma once

#include <span>
#include <vector>

#include "sia/core/types.hpp"

namespace sia {

/// Auto-curation of review clips: pads every event by `pad` on both sides,
/// clamps to [0, session_end] and merges overlapping or touching intervals.
/// `events` must be sorted by start; event_refs index into it.
std::vector<HighlightClip> detect_highlights(std::span<const ExpressiveEvent> events, Micros pad,
                                             Micros session_end);

}  // namespace sia
