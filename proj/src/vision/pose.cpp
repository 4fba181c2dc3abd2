#include "sia/vision/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace sia::vision {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

Matrix3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg) {
  const double cy = std::cos(yaw_deg * kDeg), sy = std::sin(yaw_deg * kDeg);
  const double cp = std::cos(pitch_deg * kDeg), sp = std::sin(pitch_deg * kDeg);
  const double cr = std::cos(roll_deg * kDeg), sr = std::sin(roll_deg * kDeg);
  Eigen::Matrix3d yaw, pitch, roll;
  yaw << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  pitch << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
  roll << cr, -sr, 0, sr, cr, 0, 0, 0, 1;
  Eigen::Matrix3d r = roll * pitch * yaw;
  Matrix3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = r(i, j);
  return out;
}

EulerAngles euler_from_rotation(const Matrix3& r) {
  // Row 2 of Rz*Rx*Ry is (-cp*sy, sp, cp*cy); column 1 of rows 0/1 is (-sr*cp, cr*cp).
  EulerAngles e;
  e.pitch = std::asin(std::clamp(r[2][1], -1.0, 1.0)) / kDeg;
  e.yaw = std::atan2(-r[2][0], r[2][2]) / kDeg;
  e.roll = std::atan2(-r[0][1], r[1][1]) / kDeg;
  return e;
}

PoseEstimator::PoseEstimator(const ReferenceFaceModel& model) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> m(kLandmarkCount, 3);
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    m.row(static_cast<Eigen::Index>(i)) << model.points[i].x, model.points[i].y, model.points[i].z;
  }
  m.rowwise() -= m.colwise().mean();
  Eigen::Matrix3d normal = m.transpose() * m;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (!lu.isInvertible()) throw Error("reference model is rank-deficient");
  Eigen::Matrix<double, Eigen::Dynamic, 3> g = m * lu.inverse();
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    auto row = g.row(static_cast<Eigen::Index>(i));
    projector_[i] = Point3{row(0), row(1), row(2)};
  }
}

HeadPoseSample PoseEstimator::estimate(const LandmarkFrame& frame) const {
  if (!frame.face_present) throw Error("cannot estimate head pose without a face");
  const auto& pts = frame.points;

  double mu = 0.0, mv = 0.0;
  for (const auto& p : pts) {
    mu += p.x;
    mv += p.y;
  }
  mu /= kLandmarkCount;
  mv /= kLandmarkCount;

  // Image observations with y flipped to point up, centered.
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  Eigen::Matrix<double, 2, 3> a = Eigen::Matrix<double, 2, 3>::Zero();
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const double x = pts[i].x - mu;
    const double y = -(pts[i].y - mv);
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    const auto& g = projector_[i];
    a(0, 0) += x * g.x;
    a(0, 1) += x * g.y;
    a(0, 2) += x * g.z;
    a(1, 0) += y * g.x;
    a(1, 1) += y * g.y;
    a(1, 2) += y * g.z;
  }
  // Smallest-to-largest eigenvalue ratio of the 2x2 scatter.
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  if (!(tr > 0.0) || det <= 1e-10 * tr * tr) {
    throw Error("rank-deficient landmark configuration");
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 1e-9 * sv(0))) throw Error("rank-deficient landmark configuration");
  Eigen::Matrix<double, 2, 3> rows = svd.matrixU() * svd.matrixV().leftCols<2>().transpose();
  Eigen::Vector3d r0 = rows.row(0).transpose();
  Eigen::Vector3d r1 = rows.row(1).transpose();
  Eigen::Vector3d r2 = r0.cross(r1);

  Matrix3 r{};
  for (int j = 0; j < 3; ++j) {
    r[0][j] = r0(j);
    r[1][j] = r1(j);
    r[2][j] = r2(j);
  }
  auto e = euler_from_rotation(r);
  return HeadPoseSample{frame.timestamp, e.yaw, e.pitch, e.roll};
}

HeadPoseSample estimate_head_pose(const LandmarkFrame& frame, const ReferenceFaceModel& model) {
  return PoseEstimator(model).estimate(frame);
}

}  // namespace sia::vision
