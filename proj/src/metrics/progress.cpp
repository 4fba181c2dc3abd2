#include "sia/metrics/progress.hpp"

#include <algorithm>

namespace sia::metrics {

const std::vector<std::string>& progress_metric_names() {
  static const std::vector<std::string> names = {"face_in_view_fraction", "gaze_while_speaking", "facing_fraction",
                                                 "mean_abs_yaw",          "events_per_minute",   "game_accuracy"};
  return names;
}

namespace {

std::map<std::string, std::optional<double>> values_of(const EngagementMetrics& m) {
  std::map<std::string, std::optional<double>> v;
  v["face_in_view_fraction"] = m.face_in_view_fraction;
  v["gaze_while_speaking"] = m.gaze_while_speaking_all;
  v["facing_fraction"] = m.pose.empty() ? std::nullopt : std::optional<double>(m.pose.facing_fraction);
  v["mean_abs_yaw"] = m.pose.empty() ? std::nullopt : std::optional<double>(m.pose.mean_abs_yaw);
  std::int64_t events = 0;
  for (auto c : m.event_counts) events += c;
  v["events_per_minute"] =
      m.session_end > 0 ? std::optional<double>(static_cast<double>(events) * 60e6 / static_cast<double>(m.session_end))
                        : std::nullopt;
  v["game_accuracy"] = m.game_accuracy;
  return v;
}

}  // namespace

ProgressSeries progress_series(const std::string& subject, std::vector<EngagementMetrics> sessions) {
  std::sort(sessions.begin(), sessions.end(), [](const EngagementMetrics& a, const EngagementMetrics& b) {
    return a.started_at != b.started_at ? a.started_at < b.started_at : a.session_id < b.session_id;
  });
  ProgressSeries series;
  series.subject = subject;
  for (const auto& m : sessions) series.points.push_back(ProgressPoint{m.session_id, m.started_at, values_of(m)});
  for (const auto& name : progress_metric_names()) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      const auto& v = series.points[i].values.at(name);
      if (!v) continue;
      xs.push_back(static_cast<double>(i));
      ys.push_back(*v);
    }
    series.slopes[name] = ols_slope(xs, ys);
  }
  return series;
}

Json to_json(const ProgressSeries& series) {
  Json points = Json::array();
  for (const auto& p : series.points) {
    Json values = Json::object();
    for (const auto& [k, v] : p.values) values[k] = v ? Json(*v) : Json(nullptr);
    points.push_back(Json{{"session_id", p.session_id}, {"started_at", p.started_at}, {"metrics", values}});
  }
  Json slopes = Json::object();
  for (const auto& [k, v] : series.slopes) slopes[k] = v ? Json(*v) : Json(nullptr);
  return Json{{"schema_version", 1}, {"subject", series.subject}, {"points", points}, {"slopes", slopes}};
}

}  // namespace sia::metrics
