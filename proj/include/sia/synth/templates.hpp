#pragma once

#include <array>

#include "sia/core/records.hpp"
#include "sia/vision/face_model.hpp"
#include "sia/vision/landmarks.hpp"

namespace sia::synth {

inline constexpr int kTemplateVersion = 1;

using PointOffsets = std::array<Point2, kLandmarkCount>;

/// Per-label landmark displacements (interocular units, model axes, y up)
/// applied to the neutral reference face. Neutral is all zeros.
class ExpressionTemplates {
 public:
  static ExpressionTemplates parse(const Json& doc);
  /// The table shipped in data/expression_templates_v1.json, compiled in.
  static const ExpressionTemplates& builtin();

  const PointOffsets& offsets(ExpressionLabel label) const { return offsets_[label_index(label)]; }
  int version() const { return version_; }

 private:
  int version_ = kTemplateVersion;
  std::array<PointOffsets, kLabelCount> offsets_{};
};

/// Model points with `weights[k]` times label k's offsets added.
std::array<vision::Point3, kLandmarkCount> deform(const vision::ReferenceFaceModel& model,
                                                  const ExpressionTemplates& templates,
                                                  const std::array<double, kLabelCount>& weights);

/// Frontal image projection of one label at full intensity.
LandmarkSet template_projection(ExpressionLabel label, const vision::ReferenceFaceModel& model,
                                const ExpressionTemplates& templates);

/// Canonical form of template_projection().
vision::CanonicalLandmarks template_canonical(ExpressionLabel label,
                                              const vision::ReferenceFaceModel& model = vision::builtin_reference_model(),
                                              const ExpressionTemplates& templates = ExpressionTemplates::builtin());

}  // namespace sia::synth
