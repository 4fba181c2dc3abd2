#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sia/core/records.hpp"
#include "sia/core/types.hpp"
#include "sia/vision/landmarks.hpp"

namespace sia::affect {

struct TrainingMetadata {
  int epochs = 0;
  double final_loss = 0.0;
  double learning_rate = 0.0;
  double l2_lambda = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Multinomial logistic regression: scores = softmax(W f + b).
struct ClassifierModel {
  std::size_t feature_length = vision::kFeatureLength;
  /// kLabelCount rows of feature_length weights, row-major.
  std::vector<double> weights;
  ScoreArray bias{};
  int feature_spec_version = vision::kFeatureSpecVersion;
  TrainingMetadata training;

  static ClassifierModel zeros(std::size_t feature_length = vision::kFeatureLength);

  double& weight(std::size_t label, std::size_t feature) { return weights[label * feature_length + feature]; }
  double weight(std::size_t label, std::size_t feature) const { return weights[label * feature_length + feature]; }

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

/// Row-major feature matrix plus labels.
class LabeledDataset {
 public:
  explicit LabeledDataset(std::size_t feature_length = vision::kFeatureLength, std::string provenance = {});

  void add(std::span<const double> features, ExpressionLabel label);
  void add(const vision::FeatureVector& features, ExpressionLabel label) { add(features.values, label); }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t feature_length() const { return feature_length_; }
  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * feature_length_, feature_length_};
  }
  ExpressionLabel label(std::size_t i) const { return labels_[i]; }
  const std::string& provenance() const { return provenance_; }

 private:
  std::size_t feature_length_;
  std::vector<double> features_;
  std::vector<ExpressionLabel> labels_;
  std::string provenance_;
};

struct Hyperparams {
  double learning_rate = 0.15;
  double l2_lambda = 1e-4;
  int epochs = 5000;
  std::uint64_t seed = 0;
};

/// Raw logits W f + b. Throws on dimension mismatch or non-finite features.
ScoreArray logits(const ClassifierModel& model, std::span<const double> features);
ScoreArray predict(const ClassifierModel& model, std::span<const double> features);
ClassScores predict(const ClassifierModel& model, const vision::FeatureVector& features, Micros timestamp);

/// Numerically stable softmax.
ScoreArray softmax(const ScoreArray& logits);

ExpressionLabel argmax_label(const ScoreArray& scores);

struct Gradient {
  std::vector<double> weights;
  ScoreArray bias{};
};

/// Mean cross-entropy plus (l2_lambda / 2) * ||W||^2. Bias is not regularized.
double objective(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda);

/// Analytic gradient of objective(). The dataset is split into fixed-size
/// chunks reduced in chunk order, so the result does not depend on the
/// OpenMP thread count.
Gradient gradient(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda);

/// Single-threaded straight-line reference for gradient() and objective().
Gradient gradient_reference(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda);
double objective_reference(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda);

using EpochObserver = std::function<void(int epoch, double loss)>;

/// Full-batch gradient descent from zero weights. The observer sees the
/// objective before each update and, with epoch == hp.epochs, the final one.
ClassifierModel train(const LabeledDataset& data, const Hyperparams& hp, const EpochObserver& observer = {});

struct Evaluation {
  double accuracy = 0.0;
  std::array<std::array<std::int64_t, kLabelCount>, kLabelCount> confusion{};
  /// Absent for classes with no true examples.
  std::array<std::optional<double>, kLabelCount> per_class_recall{};
  std::int64_t total = 0;
};

Evaluation evaluate_predictions(std::span<const ExpressionLabel> truth, std::span<const ExpressionLabel> predicted);
Evaluation evaluate(const ClassifierModel& model, const LabeledDataset& data);

Json to_json(const Evaluation& eval);

Json to_json(const ClassifierModel& model);
/// Refuses models whose feature_spec_version differs from the running code.
ClassifierModel model_from_json(const Json& doc);
void save_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_model(const std::filesystem::path& path);

Json to_json(const LabeledDataset& data);
LabeledDataset dataset_from_json(const Json& doc);
void save_dataset(const std::filesystem::path& path, const LabeledDataset& data);
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace sia::affect
