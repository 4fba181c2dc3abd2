#include "sia/vision/face_model.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "sia/embedded_data.hpp"

namespace sia::vision {

ReferenceFaceModel parse_reference_model(const Json& doc) {
  if (!doc.is_object()) throw Error("reference model: expected a JSON object");
  int version = doc.value("model_version", -1);
  if (version != kReferenceModelVersion) {
    throw Error("reference model: unsupported model_version " + std::to_string(version));
  }
  const auto& pts = doc.at("points");
  if (!pts.is_array() || pts.size() != kLandmarkCount) throw Error("reference model: expected 68 points");

  ReferenceFaceModel model;
  model.model_version = version;
  Eigen::Matrix<double, kLandmarkCount, 3> centered;
  Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& p = pts[i];
    if (!p.is_array() || p.size() != 3) throw Error("reference model: points must be triples");
    model.points[i] = Point3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    centered.row(static_cast<Eigen::Index>(i)) << model.points[i].x, model.points[i].y, model.points[i].z;
    mean += centered.row(static_cast<Eigen::Index>(i));
  }
  mean /= static_cast<double>(kLandmarkCount);
  centered.rowwise() -= mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  if (sv(2) <= 1e-9 * sv(0)) throw Error("reference model: points are coplanar");
  return model;
}

ReferenceFaceModel load_reference_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open reference model " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("reference model " + path.string() + ": " + e.what());
  }
  return parse_reference_model(doc);
}

const ReferenceFaceModel& builtin_reference_model() {
  static const ReferenceFaceModel model = parse_reference_model(Json::parse(embedded::reference_face_json()));
  return model;
}

LandmarkSet frontal_projection(const ReferenceFaceModel& model, double pixels_per_unit, Point2 center) {
  LandmarkSet out{};
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    out[i] = Point2{center.x + pixels_per_unit * model.points[i].x, center.y - pixels_per_unit * model.points[i].y};
  }
  return out;
}

}  // namespace sia::vision
