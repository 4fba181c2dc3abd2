#include "sia/vision/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sia::vision {

namespace {

Point2 contour_mean(const LandmarkSet& points, std::size_t first) {
  Point2 c;
  for (std::size_t i = first; i < first + kEyeContourSize; ++i) {
    c.x += points[i].x;
    c.y += points[i].y;
  }
  c.x /= kEyeContourSize;
  c.y /= kEyeContourSize;
  return c;
}

// 0-based landmark indices of the single-point salient features.
constexpr std::size_t kBrowOuterLeft = 17;
constexpr std::size_t kBrowInnerLeft = 21;
constexpr std::size_t kBrowInnerRight = 22;
constexpr std::size_t kBrowOuterRight = 26;
constexpr std::size_t kNoseTip = 30;
constexpr std::size_t kMouthCornerLeft = 48;
constexpr std::size_t kMouthCornerRight = 54;
constexpr std::size_t kUpperLipCenter = 51;
constexpr std::size_t kLowerLipCenter = 57;
constexpr std::size_t kChin = 8;

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double upper = *mid;
  if (n % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

Point2 left_eye_center(const LandmarkSet& points) { return contour_mean(points, kLeftEyeFirst); }
Point2 right_eye_center(const LandmarkSet& points) { return contour_mean(points, kRightEyeFirst); }

CanonicalLandmarks normalize_points(const LandmarkSet& points) {
  Point2 centroid;
  for (const auto& p : points) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= kLandmarkCount;
  centroid.y /= kLandmarkCount;

  const Point2 le = left_eye_center(points);
  const Point2 re = right_eye_center(points);
  const double dx = re.x - le.x;
  const double dy = re.y - le.y;
  const double interocular = std::hypot(dx, dy);
  if (!(interocular > 1e-12) || !std::isfinite(interocular)) {
    throw Error("degenerate landmarks: eye centers coincide");
  }
  // Rotate by minus the eye-line angle and scale to unit interocular distance.
  const double c = dx / interocular / interocular;
  const double s = dy / interocular / interocular;

  CanonicalLandmarks out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const double x = points[i].x - centroid.x;
    const double y = points[i].y - centroid.y;
    out.points[i] = Point2{c * x + s * y, -s * x + c * y};
  }
  return out;
}

CanonicalLandmarks normalize_landmarks(const LandmarkFrame& frame) {
  if (!frame.face_present) throw Error("cannot normalize a frame without a face");
  return normalize_points(frame.points);
}

std::array<Point2, kSalientCount> salient_points(const CanonicalLandmarks& canon) {
  const auto& p = canon.points;
  return {p[kBrowOuterLeft],   p[kBrowInnerLeft],    p[kBrowInnerRight], p[kBrowOuterRight],
          left_eye_center(p),  right_eye_center(p),  p[kNoseTip],        p[kMouthCornerLeft],
          p[kMouthCornerRight], p[kUpperLipCenter],  p[kLowerLipCenter], p[kChin]};
}

std::size_t pair_index(std::size_t i, std::size_t j) {
  return i * (2 * kSalientCount - i - 1) / 2 + (j - i - 1);
}

namespace {

void pairwise_distances(const CanonicalLandmarks& canon, double* out) {
  const auto pts = salient_points(canon);
  std::size_t k = 0;
  for (std::size_t i = 0; i < kSalientCount; ++i) {
    for (std::size_t j = i + 1; j < kSalientCount; ++j) {
      out[k++] = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    }
  }
}

}  // namespace

FeatureVector extract_features(const CanonicalLandmarks& canon,
                               const std::optional<CanonicalLandmarks>& neutral_baseline) {
  FeatureVector f;
  pairwise_distances(canon, f.values.data());
  if (neutral_baseline) {
    std::array<double, kPairCount> base{};
    pairwise_distances(*neutral_baseline, base.data());
    for (std::size_t k = 0; k < kPairCount; ++k) f.values[kPairCount + k] = f.values[k] - base[k];
    f.calibrated = true;
  }
  return f;
}

CanonicalLandmarks calibrate_neutral(std::span<const LandmarkFrame> frames) {
  std::vector<CanonicalLandmarks> canon;
  for (const auto& frame : frames) {
    if (frame.face_present) canon.push_back(normalize_landmarks(frame));
  }
  if (canon.size() < kMinCalibrationFrames) {
    throw Error("neutral calibration needs at least " + std::to_string(kMinCalibrationFrames) +
                " face-present frames, got " + std::to_string(canon.size()));
  }
  LandmarkSet median{};
  std::vector<double> xs(canon.size());
  std::vector<double> ys(canon.size());
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    for (std::size_t f = 0; f < canon.size(); ++f) {
      xs[f] = canon[f].points[i].x;
      ys[f] = canon[f].points[i].y;
    }
    median[i] = Point2{median_of(xs), median_of(ys)};
  }
  return normalize_points(median);
}

}  // namespace sia::vision
