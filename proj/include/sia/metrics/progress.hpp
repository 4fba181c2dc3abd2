#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sia/metrics/engagement.hpp"

namespace sia::metrics {

struct ProgressPoint {
  std::string session_id;
  std::string started_at;
  std::map<std::string, std::optional<double>> values;
};

/// Per-session metric values in session order, with an OLS trend per metric
/// against session index. Sessions where a metric is undefined are skipped
/// for that metric's slope but keep their index.
struct ProgressSeries {
  std::string subject;
  std::vector<ProgressPoint> points;
  std::map<std::string, std::optional<double>> slopes;
};

/// Names of the tracked metrics, in output order.
const std::vector<std::string>& progress_metric_names();

/// Orders sessions by started_at (then session_id) before indexing them.
ProgressSeries progress_series(const std::string& subject, std::vector<EngagementMetrics> sessions);

Json to_json(const ProgressSeries& series);

}  // namespace sia::metrics
