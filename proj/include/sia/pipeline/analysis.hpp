#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sia/affect/classifier.hpp"
#include "sia/vision/face_model.hpp"
#include "sia/vision/landmarks.hpp"
#include "sia/vision/pose.hpp"

namespace sia::pipeline {

/// Per-frame results of the stateless stage. Both fields are absent for
/// frames without a (usable) face.
struct FrameAnalysis {
  std::optional<ClassScores> scores;
  std::optional<HeadPoseSample> pose;

  friend bool operator==(const FrameAnalysis&, const FrameAnalysis&) = default;
};

/// normalize -> features -> classifier, plus head pose. Immutable once built;
/// analyze() may be called from many threads at once.
class FrameAnalyzer {
 public:
  FrameAnalyzer(const vision::ReferenceFaceModel& face_model, affect::ClassifierModel classifier,
                std::optional<vision::CanonicalLandmarks> neutral_baseline = std::nullopt);

  FrameAnalysis analyze(const LandmarkFrame& frame) const;

  const affect::ClassifierModel& classifier() const { return classifier_; }

 private:
  vision::PoseEstimator pose_;
  affect::ClassifierModel classifier_;
  std::optional<vision::CanonicalLandmarks> baseline_;
};

/// OpenMP kernel: frames are independent, results land at their own index.
std::vector<FrameAnalysis> analyze_batch(std::span<const LandmarkFrame> frames, const FrameAnalyzer& analyzer);

/// Serial reference for analyze_batch.
std::vector<FrameAnalysis> analyze_batch_serial(std::span<const LandmarkFrame> frames, const FrameAnalyzer& analyzer);

}  // namespace sia::pipeline
