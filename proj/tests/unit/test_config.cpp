#include <fstream>

#include "helpers.hpp"
#include "sia/config.hpp"

using namespace sia;
using sia::test::TempDir;

TEST_CASE("example config equals the defaults") {
  const auto c = load_config(std::filesystem::path(SIA_SOURCE_DIR) / "config.example.json");
  CHECK(to_json(c) == to_json(Config{}));
  CHECK(c.affect.hyperparams.epochs == 5000);
  CHECK(c.events.segmenter.min_duration == 500 * kMicrosPerMilli);
  CHECK(c.events.cues.per_label_cooldown == 5 * kMicrosPerSecond);
  CHECK_FALSE(c.events.cues.enabled(ExpressionLabel::neutral));
}

TEST_CASE("config json round trip") {
  Config c;
  c.affect.hyperparams.learning_rate = 0.2;
  c.events.segmenter.enter_threshold = 0.7;
  c.events.cues.global_rate_limit = 3;
  c.service.port = 9000;
  c.storage.data_dir = "/tmp/x";
  c.vision.model = "face.json";
  CHECK(to_json(config_from_json(to_json(c))) == to_json(c));
}

TEST_CASE("partial config keeps defaults") {
  const auto c = config_from_json(Json::parse(R"({"service": {"port": 1234}})"));
  CHECK(c.service.port == 1234);
  CHECK(c.service.bind == "127.0.0.1");
  CHECK(c.link.port == 7878);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"servcie": {}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"events": {"alpah": 0.3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"events": {"enter_threshold": 0.3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"link": {"port": 70000}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"affect": {"epochs": "many"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"([])")), ConfigError);
  TempDir dir("cfg");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::ofstream(dir / "bad.json") << "{";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
}
