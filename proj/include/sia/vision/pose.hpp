#pragma once

#include <array>

#include "sia/core/types.hpp"
#include "sia/vision/face_model.hpp"

namespace sia::vision {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// R = R_roll(z) * R_pitch(x) * R_yaw(y), angles in degrees.
Matrix3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg);

struct EulerAngles {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

EulerAngles euler_from_rotation(const Matrix3& r);

/// Weak-perspective head pose against a fixed reference model. The model's
/// normal-equation factor is computed once, so estimate() is cheap per frame.
class PoseEstimator {
 public:
  explicit PoseEstimator(const ReferenceFaceModel& model);

  /// Throws sia::Error for frames without a face or rank-deficient landmarks.
  HeadPoseSample estimate(const LandmarkFrame& frame) const;

 private:
  // G = M (M^T M)^-1 for the centered model M (68 x 3).
  std::array<Point3, kLandmarkCount> projector_{};
};

HeadPoseSample estimate_head_pose(const LandmarkFrame& frame, const ReferenceFaceModel& model);

}  // namespace sia::vision
