#pragma once

#include <span>
#include <vector>

#include "sia/core/types.hpp"

namespace sia::metrics {

/// Half-open interval [start, end) in session microseconds.
struct Span {
  Micros start = 0;
  Micros end = 0;

  Micros length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

using SpanList = std::vector<Span>;

/// Sorted, disjoint, non-touching union of the input with empty spans dropped.
SpanList normalize_spans(SpanList spans);

/// Sum of lengths of already-normalized spans.
Micros total_length(std::span<const Span> spans);

/// Intersection of two normalized span lists.
SpanList intersect(std::span<const Span> a, std::span<const Span> b);

/// Restricts normalized spans to [lo, hi).
SpanList clip(std::span<const Span> spans, Micros lo, Micros hi);

}  // namespace sia::metrics
