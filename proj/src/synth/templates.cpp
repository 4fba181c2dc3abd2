#include "sia/synth/templates.hpp"

#include "sia/embedded_data.hpp"

namespace sia::synth {

ExpressionTemplates ExpressionTemplates::parse(const Json& doc) {
  try {
    ExpressionTemplates t;
    t.version_ = doc.at("template_version").get<int>();
    if (t.version_ != kTemplateVersion) throw Error("unsupported template_version " + std::to_string(t.version_));
    if (doc.at("index_base").get<int>() != 0) throw Error("expression templates must use 0-based indices");
    const auto& labels = doc.at("labels");
    for (auto label : kAllLabels) {
      const auto& groups = labels.at(std::string(label_name(label)));
      auto& off = t.offsets_[label_index(label)];
      for (const auto& g : groups) {
        const double dx = g.at("dx").get<double>();
        const double dy = g.at("dy").get<double>();
        for (const auto& idx : g.at("points")) {
          auto i = idx.get<std::size_t>();
          if (i >= kLandmarkCount) throw Error("template point index out of range");
          off[i].x += dx;
          off[i].y += dy;
        }
      }
    }
    for (const auto& p : t.offsets_[label_index(ExpressionLabel::neutral)]) {
      if (p.x != 0.0 || p.y != 0.0) throw Error("the neutral template must have no offsets");
    }
    return t;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed expression templates: ") + e.what());
  }
}

const ExpressionTemplates& ExpressionTemplates::builtin() {
  static const ExpressionTemplates t = parse(Json::parse(embedded::expression_templates_json()));
  return t;
}

std::array<vision::Point3, kLandmarkCount> deform(const vision::ReferenceFaceModel& model,
                                                  const ExpressionTemplates& templates,
                                                  const std::array<double, kLabelCount>& weights) {
  auto pts = model.points;
  for (std::size_t k = 1; k < kLabelCount; ++k) {
    if (weights[k] == 0.0) continue;
    const auto& off = templates.offsets(static_cast<ExpressionLabel>(k));
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      pts[i].x += weights[k] * off[i].x;
      pts[i].y += weights[k] * off[i].y;
    }
  }
  return pts;
}

LandmarkSet template_projection(ExpressionLabel label, const vision::ReferenceFaceModel& model,
                                const ExpressionTemplates& templates) {
  std::array<double, kLabelCount> w{};
  w[label_index(label)] = 1.0;
  vision::ReferenceFaceModel posed = model;
  posed.points = deform(model, templates, w);
  return vision::frontal_projection(posed);
}

vision::CanonicalLandmarks template_canonical(ExpressionLabel label, const vision::ReferenceFaceModel& model,
                                              const ExpressionTemplates& templates) {
  return vision::normalize_points(template_projection(label, model, templates));
}

}  // namespace sia::synth
