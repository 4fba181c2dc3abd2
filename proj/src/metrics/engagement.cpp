#include "sia/metrics/engagement.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace sia::metrics {

void FaceVisibilityTimeline::validate(Micros session_end) const {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.start < 0 || s.end > session_end || s.start >= s.end) throw Error("timeline span outside session bounds");
    if (i > 0 && s.start < spans[i - 1].end) throw Error("timeline spans overlap or are unsorted");
  }
}

Micros frame_period(double frame_rate_hz) {
  if (!(frame_rate_hz > 0.0)) throw Error("frame rate must be positive");
  return static_cast<Micros>(std::llround(1e6 / frame_rate_hz));
}

namespace {

FaceVisibilityTimeline timeline_where(std::span<const LandmarkFrame> frames, Micros period, Micros session_end,
                                      const auto& keep) {
  SpanList spans;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].timestamp <= frames[i - 1].timestamp) throw Error("frames must strictly increase in time");
    if (!keep(frames[i])) continue;
    Micros end = i + 1 < frames.size() ? frames[i + 1].timestamp : frames[i].timestamp + period;
    spans.push_back(Span{frames[i].timestamp, end});
  }
  SpanList merged = normalize_spans(std::move(spans));
  return FaceVisibilityTimeline{clip(merged, 0, session_end)};
}

}  // namespace

FaceVisibilityTimeline visibility_timeline(std::span<const LandmarkFrame> frames, Micros period,
                                           Micros session_end) {
  return timeline_where(frames, period, session_end, [](const LandmarkFrame& f) { return f.face_present; });
}

double face_in_view_fraction(const FaceVisibilityTimeline& timeline, Micros session_end) {
  if (session_end <= 0) throw Error("session_end must be positive");
  timeline.validate(session_end);
  return static_cast<double>(total_length(timeline.spans)) / static_cast<double>(session_end);
}

std::optional<double> gaze_while_speaking(const FaceVisibilityTimeline& timeline,
                                          std::span<const SpeechActivitySpan> speech) {
  SpanList talk;
  for (const auto& s : speech) talk.push_back(Span{s.start, s.end});
  talk = normalize_spans(std::move(talk));
  const Micros talk_time = total_length(talk);
  if (talk_time == 0) return std::nullopt;
  SpanList seen = normalize_spans(timeline.spans);
  return static_cast<double>(total_length(intersect(seen, talk))) / static_cast<double>(talk_time);
}

PoseHabits pose_habits(std::span<const HeadPoseSample> poses) {
  PoseHabits h;
  if (poses.empty()) return h;
  double sum_abs = 0.0;
  std::int64_t facing = 0;
  for (const auto& p : poses) {
    if (!(p.yaw >= -90.0 && p.yaw <= 90.0)) throw Error("yaw outside [-90, 90]");
    sum_abs += std::abs(p.yaw);
    if (std::abs(p.yaw) <= kFacingYawDeg) ++facing;
    auto bin = static_cast<std::size_t>(std::floor((p.yaw + 90.0) / 20.0));
    ++h.yaw_histogram[std::min(bin, kYawBins - 1)];
  }
  h.sample_count = static_cast<std::int64_t>(poses.size());
  h.mean_abs_yaw = sum_abs / static_cast<double>(poses.size());
  h.facing_fraction = static_cast<double>(facing) / static_cast<double>(poses.size());
  return h;
}

std::optional<double> ols_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("ols_slope: size mismatch");
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

std::optional<double> ols_slope(std::span<const double> values) {
  std::vector<double> xs(values.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  return ols_slope(xs, values);
}

GameAccuracyTrend game_accuracy_trend(std::span<const std::vector<GameTrial>> sessions) {
  GameAccuracyTrend trend;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& trials = sessions[i];
    if (trials.empty()) throw Error("session " + std::to_string(i) + " has no game trials");
    auto correct = std::count_if(trials.begin(), trials.end(), [](const GameTrial& t) { return t.correct(); });
    trend.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(trials.size()));
  }
  trend.slope = ols_slope(trend.accuracies);
  return trend;
}

Micros session_end_of(const SessionJournal& journal) {
  if (auto declared = journal.declared_session_end()) return *declared;
  const auto& meta = journal.meta();
  for (auto it = journal.records.rbegin(); it != journal.records.rend(); ++it) {
    if (const auto* f = std::get_if<LandmarkFrame>(&*it)) return f->timestamp + frame_period(meta.frame_rate_hz);
  }
  return 0;
}

EngagementMetrics session_summary(const SessionJournal& journal) {
  const SessionMeta& meta = journal.meta();
  EngagementMetrics m;
  m.session_id = meta.session_id;
  m.subject = meta.subject;
  m.started_at = meta.started_at;
  m.session_end = session_end_of(journal);

  const auto frames = journal.collect<LandmarkFrame>();
  const auto poses = journal.collect<HeadPoseSample>();
  const auto speech = journal.collect<SpeechActivitySpan>();
  const Micros period = frame_period(meta.frame_rate_hz);

  m.frame_count = static_cast<std::int64_t>(frames.size());
  m.face_frame_count = std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.face_present; });
  m.timeline = visibility_timeline(frames, period, m.session_end);
  m.face_in_view_fraction = m.session_end > 0 ? face_in_view_fraction(m.timeline, m.session_end) : 0.0;

  std::unordered_map<Micros, double> yaw_at;
  for (const auto& p : poses) yaw_at[p.timestamp] = p.yaw;
  const auto facing = timeline_where(frames, period, m.session_end, [&](const LandmarkFrame& f) {
    if (!f.face_present) return false;
    auto it = yaw_at.find(f.timestamp);
    return it != yaw_at.end() && std::abs(it->second) <= kFacingYawDeg;
  });

  // Without any tracked face the gaze ratios are undefined, not zero.
  const bool tracked = m.face_frame_count > 0;
  std::map<std::string, std::vector<SpeechActivitySpan>> by_speaker;
  for (const auto& s : speech) by_speaker[s.speaker_id].push_back(s);
  for (const auto& [speaker, spans] : by_speaker) {
    m.gaze_while_speaking[speaker] = tracked ? gaze_while_speaking(m.timeline, spans) : std::nullopt;
    m.gaze_while_speaking_facing[speaker] = tracked ? gaze_while_speaking(facing, spans) : std::nullopt;
  }
  m.gaze_while_speaking_all = tracked ? gaze_while_speaking(m.timeline, speech) : std::nullopt;

  m.pose = pose_habits(poses);

  for (const auto& cue : journal.collect<Cue>()) {
    auto& c = m.cue_counts[label_index(cue.label)];
    (cue.suppressed() ? c.suppressed : c.issued) += 1;
  }
  for (const auto& ev : journal.collect<ExpressiveEvent>()) ++m.event_counts[label_index(ev.label)];

  const auto trials = journal.collect<GameTrial>();
  m.game_trials = static_cast<std::int64_t>(trials.size());
  if (!trials.empty()) {
    std::vector<std::vector<GameTrial>> one{trials};
    m.game_accuracy = game_accuracy_trend(one).accuracies.front();
  }
  return m;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json optional_map(const std::map<std::string, std::optional<double>>& values) {
  Json out = Json::object();
  for (const auto& [k, v] : values) out[k] = optional_number(v);
  return out;
}

}  // namespace

Json to_json(const PoseHabits& pose) {
  return Json{{"mean_abs_yaw", pose.mean_abs_yaw},
              {"yaw_histogram", pose.yaw_histogram},
              {"facing_fraction", pose.facing_fraction},
              {"sample_count", pose.sample_count},
              {"empty", pose.empty()}};
}

Json to_json(const EngagementMetrics& m) {
  Json cues = Json::object();
  Json events = Json::object();
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    std::string name(label_name(static_cast<ExpressionLabel>(k)));
    cues[name] = Json{{"issued", m.cue_counts[k].issued}, {"suppressed", m.cue_counts[k].suppressed}};
    events[name] = m.event_counts[k];
  }
  Json spans = Json::array();
  for (const auto& s : m.timeline.spans) spans.push_back(Json::array({s.start, s.end}));
  return Json{{"schema_version", 1},
              {"session_id", m.session_id},
              {"subject", m.subject},
              {"started_at", m.started_at},
              {"session_end_us", m.session_end},
              {"frame_count", m.frame_count},
              {"face_frame_count", m.face_frame_count},
              {"face_in_view_fraction", m.face_in_view_fraction},
              {"face_visibility_spans", spans},
              {"gaze_while_speaking", optional_map(m.gaze_while_speaking)},
              {"gaze_while_speaking_facing", optional_map(m.gaze_while_speaking_facing)},
              {"gaze_while_speaking_all", optional_number(m.gaze_while_speaking_all)},
              {"pose_habits", to_json(m.pose)},
              {"cue_counts", cues},
              {"event_counts", events},
              {"game_trials", m.game_trials},
              {"game_accuracy", optional_number(m.game_accuracy)}};
}

}  // namespace sia::metrics
