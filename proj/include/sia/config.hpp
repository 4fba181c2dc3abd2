#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sia/affect/classifier.hpp"
#include "sia/events/config.hpp"
#include "sia/pipeline/analysis.hpp"

namespace sia {

/// Raised for unreadable or invalid configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct VisionConfig {
  /// Reference face model JSON; the built-in model when absent.
  std::optional<std::filesystem::path> model;
};

struct AffectConfig {
  /// Trained classifier; when absent one is trained on the synthetic set.
  std::optional<std::filesystem::path> model;
  affect::Hyperparams hyperparams;
  int train_per_class = 50;
  double train_noise_sigma = 0.005;
};

struct StorageConfig {
  std::filesystem::path data_dir = "sessions";
};

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  std::uint16_t port = 8080;
};

struct LinkConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
};

struct Config {
  VisionConfig vision;
  AffectConfig affect;
  events::EventsConfig events;
  StorageConfig storage;
  ServiceConfig service;
  LinkConfig link;
};

/// Strict: unknown keys anywhere raise ConfigError. Missing keys keep defaults.
Config config_from_json(const Json& doc);
Config load_config(const std::filesystem::path& path);
Json to_json(const Config& config);

/// The synthetic training set and classifier used when no model file is configured.
affect::LabeledDataset default_training_set(const AffectConfig& config);
affect::ClassifierModel default_classifier(const AffectConfig& config);

affect::ClassifierModel load_or_train_classifier(const AffectConfig& config);
pipeline::FrameAnalyzer make_analyzer(const Config& config);

}  // namespace sia
