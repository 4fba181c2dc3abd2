#pragma once

#include <array>
#include <optional>
#include <span>

#include "sia/core/types.hpp"

namespace sia::vision {

/// Landmarks with centroid at the origin, eye line horizontal and unit
/// interocular distance. Still image-oriented (y grows downward).
struct CanonicalLandmarks {
  LandmarkSet points{};

  friend bool operator==(const CanonicalLandmarks&, const CanonicalLandmarks&) = default;
};

inline constexpr std::size_t kSalientCount = 12;
inline constexpr std::size_t kPairCount = kSalientCount * (kSalientCount - 1) / 2;
inline constexpr std::size_t kFeatureLength = 2 * kPairCount;
inline constexpr int kFeatureSpecVersion = 1;

struct FeatureVector {
  /// Pairwise salient-point distances, then deltas against the neutral baseline.
  std::array<double, kFeatureLength> values{};
  bool calibrated = false;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// 0-based iBUG indices of the eye contours.
inline constexpr std::size_t kLeftEyeFirst = 36;
inline constexpr std::size_t kRightEyeFirst = 42;
inline constexpr std::size_t kEyeContourSize = 6;

Point2 left_eye_center(const LandmarkSet& points);
Point2 right_eye_center(const LandmarkSet& points);

/// Similarity-normalizes raw landmarks. Throws sia::Error when the eye
/// centers coincide.
CanonicalLandmarks normalize_points(const LandmarkSet& points);
/// Throws sia::Error when the frame has no face.
CanonicalLandmarks normalize_landmarks(const LandmarkFrame& frame);

/// The 12 salient points: brow ends 18, 22, 23, 27; both eye centers;
/// nose tip 31; mouth corners 49, 55; lip centers 52, 58; chin 9 (1-based).
std::array<Point2, kSalientCount> salient_points(const CanonicalLandmarks& canon);

FeatureVector extract_features(const CanonicalLandmarks& canon,
                               const std::optional<CanonicalLandmarks>& neutral_baseline = std::nullopt);

/// Index of the (i, j) salient pair, i < j, inside the distance half.
std::size_t pair_index(std::size_t i, std::size_t j);

inline constexpr std::size_t kMinCalibrationFrames = 10;

/// Per-point coordinate-wise median of the normalized face-present frames,
/// normalized again. Needs at least kMinCalibrationFrames of them.
CanonicalLandmarks calibrate_neutral(std::span<const LandmarkFrame> frames);

}  // namespace sia::vision
