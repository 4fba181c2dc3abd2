#include "sia/config.hpp"

#include <fstream>
#include <set>

#include "sia/synth/scenario.hpp"
#include "sia/vision/face_model.hpp"

namespace sia {

namespace {

void check_keys(const Json& j, const std::string& section, const std::set<std::string>& known) {
  if (!j.is_object()) throw ConfigError("config: " + section + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key " + section + "." + key);
  }
}

std::optional<std::filesystem::path> opt_path(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return std::filesystem::path(j.at(key).get<std::string>());
}

Json path_or_null(const std::optional<std::filesystem::path>& p) { return p ? Json(p->string()) : Json(nullptr); }

std::uint16_t port_of(const Json& j, std::uint16_t fallback) {
  if (!j.contains("port")) return fallback;
  const auto v = j.at("port").get<std::int64_t>();
  if (v < 0 || v > 65535) throw ConfigError("config: port out of range");
  return static_cast<std::uint16_t>(v);
}

}  // namespace

Config config_from_json(const Json& doc) {
  check_keys(doc, "<root>", {"vision", "affect", "events", "storage", "service", "link"});
  Config c;
  try {
    if (doc.contains("vision")) {
      const auto& j = doc.at("vision");
      check_keys(j, "vision", {"model"});
      c.vision.model = opt_path(j, "model");
    }
    if (doc.contains("affect")) {
      const auto& j = doc.at("affect");
      check_keys(j, "affect",
                 {"model", "learning_rate", "l2_lambda", "epochs", "seed", "train_per_class", "train_noise_sigma"});
      auto& a = c.affect;
      a.model = opt_path(j, "model");
      a.hyperparams.learning_rate = j.value("learning_rate", a.hyperparams.learning_rate);
      a.hyperparams.l2_lambda = j.value("l2_lambda", a.hyperparams.l2_lambda);
      a.hyperparams.epochs = j.value("epochs", a.hyperparams.epochs);
      a.hyperparams.seed = j.value("seed", a.hyperparams.seed);
      a.train_per_class = j.value("train_per_class", a.train_per_class);
      a.train_noise_sigma = j.value("train_noise_sigma", a.train_noise_sigma);
      if (!(a.hyperparams.learning_rate > 0.0) || !(a.hyperparams.l2_lambda >= 0.0) || a.hyperparams.epochs < 0 ||
          a.train_per_class < 1 || !(a.train_noise_sigma >= 0.0)) {
        throw ConfigError("config: affect values out of range");
      }
    }
    if (doc.contains("events")) c.events = events::events_config_from_json(doc.at("events"));
    if (doc.contains("storage")) {
      const auto& j = doc.at("storage");
      check_keys(j, "storage", {"data_dir"});
      if (j.contains("data_dir")) c.storage.data_dir = j.at("data_dir").get<std::string>();
    }
    if (doc.contains("service")) {
      const auto& j = doc.at("service");
      check_keys(j, "service", {"bind", "port"});
      c.service.bind = j.value("bind", c.service.bind);
      c.service.port = port_of(j, c.service.port);
    }
    if (doc.contains("link")) {
      const auto& j = doc.at("link");
      check_keys(j, "link", {"host", "port"});
      c.link.host = j.value("host", c.link.host);
      c.link.port = port_of(j, c.link.port);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

Json to_json(const Config& c) {
  const auto& hp = c.affect.hyperparams;
  return Json{{"vision", {{"model", path_or_null(c.vision.model)}}},
              {"affect",
               {{"model", path_or_null(c.affect.model)},
                {"learning_rate", hp.learning_rate},
                {"l2_lambda", hp.l2_lambda},
                {"epochs", hp.epochs},
                {"seed", hp.seed},
                {"train_per_class", c.affect.train_per_class},
                {"train_noise_sigma", c.affect.train_noise_sigma}}},
              {"events", events::to_json(c.events)},
              {"storage", {{"data_dir", c.storage.data_dir.string()}}},
              {"service", {{"bind", c.service.bind}, {"port", c.service.port}}},
              {"link", {{"host", c.link.host}, {"port", c.link.port}}}};
}

affect::LabeledDataset default_training_set(const AffectConfig& config) {
  return synth::make_training_set(config.train_per_class, config.train_noise_sigma, config.hyperparams.seed);
}

affect::ClassifierModel default_classifier(const AffectConfig& config) {
  return affect::train(default_training_set(config), config.hyperparams);
}

affect::ClassifierModel load_or_train_classifier(const AffectConfig& config) {
  if (config.model) return affect::load_model(*config.model);
  return default_classifier(config);
}

pipeline::FrameAnalyzer make_analyzer(const Config& config) {
  const auto face = config.vision.model ? vision::load_reference_model(*config.vision.model)
                                        : vision::builtin_reference_model();
  return pipeline::FrameAnalyzer(face, load_or_train_classifier(config.affect));
}

}  // namespace sia
