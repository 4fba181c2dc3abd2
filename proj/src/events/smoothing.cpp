#include "sia/events/smoothing.hpp"

#include <cmath>

namespace sia::events {

void SmoothingConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("smoothing alpha must lie in (0, 1]");
}

ScoreSmoother::ScoreSmoother(SmoothingConfig config) : config_(config) { config_.validate(); }

ClassScores ScoreSmoother::push(const ClassScores& raw) {
  if (!state_) {
    state_ = raw.scores;
    return raw;
  }
  const double a = config_.alpha;
  for (std::size_t k = 0; k < kLabelCount; ++k) (*state_)[k] = a * raw.scores[k] + (1.0 - a) * (*state_)[k];
  return ClassScores{raw.timestamp, *state_};
}

std::vector<ClassScores> smooth(std::span<const ClassScores> stream, const SmoothingConfig& config) {
  ScoreSmoother smoother(config);
  std::vector<ClassScores> out;
  out.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (i > 0 && stream[i].timestamp < stream[i - 1].timestamp) throw Error("score stream is not time-ordered");
    out.push_back(smoother.push(stream[i]));
  }
  return out;
}

}  // namespace sia::events
