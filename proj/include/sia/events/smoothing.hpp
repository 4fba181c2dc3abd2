#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sia/core/types.hpp"

namespace sia::events {

struct SmoothingConfig {
  double alpha = 0.3;

  void validate() const;
};

/// Per-label exponential moving average, s_t = a*p_t + (1-a)*s_{t-1}, s_0 = p_0.
class ScoreSmoother {
 public:
  explicit ScoreSmoother(SmoothingConfig config);

  ClassScores push(const ClassScores& raw);
  void reset() { state_.reset(); }

 private:
  SmoothingConfig config_;
  std::optional<ScoreArray> state_;
};

std::vector<ClassScores> smooth(std::span<const ClassScores> stream, const SmoothingConfig& config);

}  // namespace sia::events
