#include "sia/events/config.hpp"

#include <cmath>
#include <set>

namespace sia::events {

void EventsConfig::validate() const {
  smoothing.validate();
  segmenter.validate();
  cues.validate();
}

EventsConfig events_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error("config: events must be an object");
  static const std::set<std::string> known = {"alpha",           "enter_threshold", "exit_threshold",
                                              "min_duration_ms", "cooldown_ms",     "rate_limit_per_min",
                                              "channel",         "enabled_labels"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error("config: unknown key events." + key);
  }
  auto ms = [&](const char* key, Micros fallback) {
    if (!j.contains(key)) return fallback;
    return static_cast<Micros>(std::llround(j.at(key).get<double>() * 1000.0));
  };
  try {
    EventsConfig c;
    c.smoothing.alpha = j.value("alpha", c.smoothing.alpha);
    c.segmenter.enter_threshold = j.value("enter_threshold", c.segmenter.enter_threshold);
    c.segmenter.exit_threshold = j.value("exit_threshold", c.segmenter.exit_threshold);
    c.segmenter.min_duration = ms("min_duration_ms", c.segmenter.min_duration);
    c.cues.per_label_cooldown = ms("cooldown_ms", c.cues.per_label_cooldown);
    c.cues.global_rate_limit = j.value("rate_limit_per_min", c.cues.global_rate_limit);
    if (j.contains("channel")) c.cues.channel = channel_from_name(j.at("channel").get<std::string>());
    if (j.contains("enabled_labels")) {
      c.cues.enabled_labels.fill(false);
      for (const auto& name : j.at("enabled_labels")) {
        auto label = label_from_name(name.get<std::string>());
        if (label == ExpressionLabel::neutral) throw Error("config: neutral cannot be cued");
        c.cues.enabled_labels[label_index(label)] = true;
      }
    }
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw Error(std::string("config: events: ") + e.what());
  }
}

Json to_json(const EventsConfig& c) {
  Json labels = Json::array();
  for (auto l : kAllLabels) {
    if (c.cues.enabled(l)) labels.push_back(label_name(l));
  }
  return Json{{"alpha", c.smoothing.alpha},
              {"enter_threshold", c.segmenter.enter_threshold},
              {"exit_threshold", c.segmenter.exit_threshold},
              {"min_duration_ms", static_cast<double>(c.segmenter.min_duration) / 1000.0},
              {"cooldown_ms", static_cast<double>(c.cues.per_label_cooldown) / 1000.0},
              {"rate_limit_per_min", c.cues.global_rate_limit},
              {"channel", channel_name(c.cues.channel)},
              {"enabled_labels", labels}};
}

}  // namespace sia::events
