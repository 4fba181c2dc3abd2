#include "sia/metrics/intervals.hpp"

#include <algorithm>

namespace sia::metrics {

SpanList normalize_spans(SpanList spans) {
  std::erase_if(spans, [](const Span& s) { return s.end <= s.start; });
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start != b.start ? a.start < b.start : a.end < b.end; });
  SpanList out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

Micros total_length(std::span<const Span> spans) {
  Micros total = 0;
  for (const auto& s : spans) total += s.length();
  return total;
}

SpanList intersect(std::span<const Span> a, std::span<const Span> b) {
  SpanList out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Micros lo = std::max(a[i].start, b[j].start);
    Micros hi = std::min(a[i].end, b[j].end);
    if (lo < hi) out.push_back(Span{lo, hi});
    if (a[i].end < b[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

SpanList clip(std::span<const Span> spans, Micros lo, Micros hi) {
  SpanList out;
  for (const auto& s : spans) {
    Span c{std::max(s.start, lo), std::min(s.end, hi)};
    if (c.start < c.end) out.push_back(c);
  }
  return out;
}

}  // namespace sia::metrics
