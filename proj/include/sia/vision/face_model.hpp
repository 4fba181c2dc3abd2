#pragma once

#include <array>
#include <filesystem>

#include "sia/core/records.hpp"
#include "sia/core/types.hpp"

namespace sia::vision {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Rigid neutral 3D face in iBUG 68-point order. Units are interocular
/// distances; axes are x right, y up, z toward the camera.
struct ReferenceFaceModel {
  int model_version = 1;
  std::array<Point3, kLandmarkCount> points{};
};

inline constexpr int kReferenceModelVersion = 1;

/// Throws sia::Error on wrong version, wrong point count or coplanar points.
ReferenceFaceModel parse_reference_model(const Json& doc);
ReferenceFaceModel load_reference_model(const std::filesystem::path& path);

/// The model shipped in data/reference_face_v1.json, compiled in.
const ReferenceFaceModel& builtin_reference_model();

/// Image-space projection used by fixtures: x right, y down, scaled by
/// `pixels_per_unit` around `center`, with the model's z dropped.
LandmarkSet frontal_projection(const ReferenceFaceModel& model, double pixels_per_unit = 100.0,
                               Point2 center = {320.0, 240.0});

}  // namespace sia::vision
