#include "sia/affect/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace sia::affect {

namespace {

constexpr std::size_t kGradientChunk = 128;

void check_dims(const ClassifierModel& model, std::size_t feature_length) {
  if (model.weights.size() != kLabelCount * model.feature_length) {
    throw Error("classifier weights do not match its feature length");
  }
  if (feature_length != model.feature_length) {
    throw Error("feature length " + std::to_string(feature_length) + " does not match model (" +
                std::to_string(model.feature_length) + ")");
  }
}

ScoreArray raw_logits(const ClassifierModel& model, std::span<const double> f) {
  ScoreArray z = model.bias;
  const std::size_t d = model.feature_length;
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    const double* w = model.weights.data() + k * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += w[j] * f[j];
    z[k] += acc;
  }
  return z;
}

double log_sum_exp(const ScoreArray& z) {
  double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

double squared_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

// Accumulates sum of per-example losses and (p - y) outer products for [begin, end).
void accumulate(const ClassifierModel& model, const LabeledDataset& data, std::size_t begin, std::size_t end,
                double& loss, double* dw, double* db) {
  const std::size_t d = model.feature_length;
  for (std::size_t i = begin; i < end; ++i) {
    auto f = data.features(i);
    ScoreArray z = raw_logits(model, f);
    const double lse = log_sum_exp(z);
    const std::size_t y = label_index(data.label(i));
    loss += lse - z[y];
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      const double r = std::exp(z[k] - lse) - (k == y ? 1.0 : 0.0);
      db[k] += r;
      double* row = dw + k * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += r * f[j];
    }
  }
}

struct LossAndGradient {
  double loss = 0.0;
  Gradient grad;
};

LossAndGradient chunked_loss_and_gradient(const ClassifierModel& model, const LabeledDataset& data,
                                          double l2_lambda) {
  check_dims(model, data.feature_length());
  if (data.empty()) throw Error("dataset is empty");
  const std::size_t d = model.feature_length;
  const std::size_t n = data.size();
  const std::size_t chunks = (n + kGradientChunk - 1) / kGradientChunk;
  const std::size_t stride = kLabelCount * d + kLabelCount + 1;
  std::vector<double> partial(chunks * stride, 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    double* slot = partial.data() + static_cast<std::size_t>(c) * stride;
    const std::size_t begin = static_cast<std::size_t>(c) * kGradientChunk;
    accumulate(model, data, begin, std::min(n, begin + kGradientChunk), slot[stride - 1], slot,
               slot + kLabelCount * d);
  }

  LossAndGradient out;
  out.grad.weights.assign(kLabelCount * d, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* slot = partial.data() + c * stride;
    for (std::size_t j = 0; j < kLabelCount * d; ++j) out.grad.weights[j] += slot[j];
    for (std::size_t k = 0; k < kLabelCount; ++k) out.grad.bias[k] += slot[kLabelCount * d + k];
    out.loss += slot[stride - 1];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < kLabelCount * d; ++j) {
    out.grad.weights[j] = out.grad.weights[j] * inv_n + l2_lambda * model.weights[j];
  }
  for (auto& b : out.grad.bias) b *= inv_n;
  out.loss = out.loss * inv_n + 0.5 * l2_lambda * squared_norm(model.weights);
  return out;
}

}  // namespace

ClassifierModel ClassifierModel::zeros(std::size_t feature_length) {
  ClassifierModel m;
  m.feature_length = feature_length;
  m.weights.assign(kLabelCount * feature_length, 0.0);
  return m;
}

LabeledDataset::LabeledDataset(std::size_t feature_length, std::string provenance)
    : feature_length_(feature_length), provenance_(std::move(provenance)) {}

void LabeledDataset::add(std::span<const double> features, ExpressionLabel label) {
  if (features.size() != feature_length_) throw Error("feature length mismatch in dataset");
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

ScoreArray softmax(const ScoreArray& z) {
  const double m = *std::max_element(z.begin(), z.end());
  ScoreArray p{};
  double s = 0.0;
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    p[k] = std::exp(z[k] - m);
    s += p[k];
  }
  for (auto& v : p) v /= s;
  return p;
}

ExpressionLabel argmax_label(const ScoreArray& scores) {
  return static_cast<ExpressionLabel>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

ScoreArray logits(const ClassifierModel& model, std::span<const double> features) {
  check_dims(model, features.size());
  for (double v : features) {
    if (!std::isfinite(v)) throw Error("non-finite feature value");
  }
  return raw_logits(model, features);
}

ScoreArray predict(const ClassifierModel& model, std::span<const double> features) {
  return softmax(logits(model, features));
}

ClassScores predict(const ClassifierModel& model, const vision::FeatureVector& features, Micros timestamp) {
  return ClassScores{timestamp, predict(model, features.values)};
}

double objective(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda) {
  return chunked_loss_and_gradient(model, data, l2_lambda).loss;
}

Gradient gradient(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda) {
  return chunked_loss_and_gradient(model, data, l2_lambda).grad;
}

double objective_reference(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda) {
  check_dims(model, data.feature_length());
  if (data.empty()) throw Error("dataset is empty");
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ScoreArray p = softmax(raw_logits(model, data.features(i)));
    loss -= std::log(p[label_index(data.label(i))]);
  }
  return loss / static_cast<double>(data.size()) + 0.5 * l2_lambda * squared_norm(model.weights);
}

Gradient gradient_reference(const ClassifierModel& model, const LabeledDataset& data, double l2_lambda) {
  check_dims(model, data.feature_length());
  if (data.empty()) throw Error("dataset is empty");
  const std::size_t d = model.feature_length;
  const double n = static_cast<double>(data.size());
  Gradient g;
  g.weights.assign(kLabelCount * d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto f = data.features(i);
    ScoreArray p = softmax(raw_logits(model, f));
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      const double r = (p[k] - (label_index(data.label(i)) == k ? 1.0 : 0.0)) / n;
      g.bias[k] += r;
      for (std::size_t j = 0; j < d; ++j) g.weights[k * d + j] += r * f[j];
    }
  }
  for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] += l2_lambda * model.weights[j];
  return g;
}

ClassifierModel train(const LabeledDataset& data, const Hyperparams& hp, const EpochObserver& observer) {
  if (data.empty()) throw Error("cannot train on an empty dataset");
  if (!(hp.learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (!(hp.l2_lambda >= 0.0)) throw Error("l2_lambda must be non-negative");
  if (hp.epochs < 0) throw Error("epochs must be non-negative");

  ClassifierModel model = ClassifierModel::zeros(data.feature_length());
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    auto step = chunked_loss_and_gradient(model, data, hp.l2_lambda);
    if (!std::isfinite(step.loss)) throw Error("training diverged at epoch " + std::to_string(epoch));
    if (observer) observer(epoch, step.loss);
    for (std::size_t j = 0; j < model.weights.size(); ++j) model.weights[j] -= hp.learning_rate * step.grad.weights[j];
    for (std::size_t k = 0; k < kLabelCount; ++k) model.bias[k] -= hp.learning_rate * step.grad.bias[k];
  }
  const double final_loss = objective(model, data, hp.l2_lambda);
  if (!std::isfinite(final_loss)) throw Error("training diverged at epoch " + std::to_string(hp.epochs));
  if (observer) observer(hp.epochs, final_loss);
  model.training = TrainingMetadata{hp.epochs, final_loss, hp.learning_rate, hp.l2_lambda, hp.seed};
  return model;
}

Evaluation evaluate_predictions(std::span<const ExpressionLabel> truth, std::span<const ExpressionLabel> predicted) {
  if (truth.empty()) throw Error("cannot evaluate on an empty dataset");
  if (truth.size() != predicted.size()) throw Error("prediction count does not match dataset");
  Evaluation ev;
  ev.total = static_cast<std::int64_t>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) ++ev.confusion[label_index(truth[i])][label_index(predicted[i])];
  std::int64_t hits = 0;
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    hits += ev.confusion[k][k];
    std::int64_t row = 0;
    for (auto c : ev.confusion[k]) row += c;
    if (row > 0) ev.per_class_recall[k] = static_cast<double>(ev.confusion[k][k]) / static_cast<double>(row);
  }
  ev.accuracy = static_cast<double>(hits) / static_cast<double>(ev.total);
  return ev;
}

Evaluation evaluate(const ClassifierModel& model, const LabeledDataset& data) {
  if (data.empty()) throw Error("cannot evaluate on an empty dataset");
  std::vector<ExpressionLabel> truth(data.size());
  std::vector<ExpressionLabel> predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    truth[i] = data.label(i);
    predicted[i] = argmax_label(logits(model, data.features(i)));
  }
  return evaluate_predictions(truth, predicted);
}

Json to_json(const Evaluation& ev) {
  Json recall = Json::object();
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    recall[std::string(label_name(static_cast<ExpressionLabel>(k)))] =
        ev.per_class_recall[k] ? Json(*ev.per_class_recall[k]) : Json(nullptr);
  }
  return Json{{"accuracy", ev.accuracy}, {"confusion_matrix", ev.confusion}, {"per_class_recall", recall},
              {"total", ev.total}};
}

Json to_json(const ClassifierModel& model) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    rows.push_back(std::vector<double>(model.weights.begin() + static_cast<std::ptrdiff_t>(k * model.feature_length),
                                       model.weights.begin() +
                                           static_cast<std::ptrdiff_t>((k + 1) * model.feature_length)));
  }
  Json labels = Json::array();
  for (auto l : kAllLabels) labels.push_back(label_name(l));
  return Json{{"format", "sia-classifier"},
              {"feature_spec_version", model.feature_spec_version},
              {"feature_length", model.feature_length},
              {"labels", labels},
              {"weights", rows},
              {"bias", model.bias},
              {"training",
               {{"epochs", model.training.epochs},
                {"final_loss", model.training.final_loss},
                {"learning_rate", model.training.learning_rate},
                {"l2_lambda", model.training.l2_lambda},
                {"seed", model.training.seed}}}};
}

ClassifierModel model_from_json(const Json& doc) {
  try {
    if (doc.at("format") != "sia-classifier") throw Error("not a classifier model file");
    int version = doc.at("feature_spec_version").get<int>();
    if (version != vision::kFeatureSpecVersion) {
      throw Error("model feature_spec_version " + std::to_string(version) + " does not match " +
                  std::to_string(vision::kFeatureSpecVersion));
    }
    ClassifierModel m = ClassifierModel::zeros(doc.at("feature_length").get<std::size_t>());
    m.feature_spec_version = version;
    const auto& rows = doc.at("weights");
    if (rows.size() != kLabelCount) throw Error("model must have 8 weight rows");
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      if (rows[k].size() != m.feature_length) throw Error("weight row length mismatch");
      for (std::size_t j = 0; j < m.feature_length; ++j) m.weight(k, j) = rows[k][j].get<double>();
    }
    m.bias = doc.at("bias").get<ScoreArray>();
    const auto& t = doc.at("training");
    m.training = TrainingMetadata{t.at("epochs").get<int>(), t.at("final_loss").get<double>(),
                                  t.at("learning_rate").get<double>(), t.at("l2_lambda").get<double>(),
                                  t.at("seed").get<std::uint64_t>()};
    for (double w : m.weights) {
      if (!std::isfinite(w)) throw Error("model has non-finite weights");
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed classifier model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model " + path.string());
  out << canonical_json(to_json(model)) << '\n';
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model " + path.string());
  try {
    return model_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error("model " + path.string() + ": " + e.what());
  }
}

Json to_json(const LabeledDataset& data) {
  Json examples = Json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto f = data.features(i);
    examples.push_back(Json{{"label", label_name(data.label(i))}, {"features", std::vector<double>(f.begin(), f.end())}});
  }
  return Json{{"format", "sia-dataset"},
              {"feature_spec_version", vision::kFeatureSpecVersion},
              {"feature_length", data.feature_length()},
              {"provenance", data.provenance()},
              {"examples", examples}};
}

LabeledDataset dataset_from_json(const Json& doc) {
  try {
    if (doc.at("format") != "sia-dataset") throw Error("not a dataset file");
    if (doc.at("feature_spec_version").get<int>() != vision::kFeatureSpecVersion) {
      throw Error("dataset feature_spec_version does not match");
    }
    LabeledDataset data(doc.at("feature_length").get<std::size_t>(), doc.value("provenance", std::string{}));
    for (const auto& ex : doc.at("examples")) {
      data.add(ex.at("features").get<std::vector<double>>(), label_from_name(ex.at("label").get<std::string>()));
    }
    return data;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed dataset: ") + e.what());
  }
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset " + path.string());
  out << canonical_json(to_json(data)) << '\n';
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  try {
    return dataset_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error("dataset " + path.string() + ": " + e.what());
  }
}

}  // namespace sia::affect
