#include "sia/pipeline/analysis.hpp"

namespace sia::pipeline {

FrameAnalyzer::FrameAnalyzer(const vision::ReferenceFaceModel& face_model, affect::ClassifierModel classifier,
                             std::optional<vision::CanonicalLandmarks> neutral_baseline)
    : pose_(face_model), classifier_(std::move(classifier)), baseline_(std::move(neutral_baseline)) {
  if (classifier_.feature_length != vision::kFeatureLength) {
    throw Error("classifier feature length does not match the landmark feature extractor");
  }
}

FrameAnalysis FrameAnalyzer::analyze(const LandmarkFrame& frame) const {
  FrameAnalysis out;
  if (!frame.face_present) return out;
  try {
    const auto canon = vision::normalize_landmarks(frame);
    out.scores = affect::predict(classifier_, vision::extract_features(canon, baseline_), frame.timestamp);
  } catch (const Error&) {
    // Degenerate or non-finite landmarks: treated like a missing face.
    return FrameAnalysis{};
  }
  try {
    out.pose = pose_.estimate(frame);
  } catch (const Error&) {
    out.pose.reset();
  }
  return out;
}

std::vector<FrameAnalysis> analyze_batch(std::span<const LandmarkFrame> frames, const FrameAnalyzer& analyzer) {
  std::vector<FrameAnalysis> out(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = analyzer.analyze(frames[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<FrameAnalysis> analyze_batch_serial(std::span<const LandmarkFrame> frames, const FrameAnalyzer& analyzer) {
  std::vector<FrameAnalysis> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(analyzer.analyze(f));
  return out;
}

}  // namespace sia::pipeline
