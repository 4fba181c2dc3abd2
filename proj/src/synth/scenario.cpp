#include "sia/synth/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "sia/vision/pose.hpp"

namespace sia::synth {

namespace {

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

Rect bounding_box(const LandmarkSet& pts) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

bool inside(Micros t, Micros start, Micros end) { return t >= start && t < end; }

}  // namespace

void Scenario::validate() const {
  if (duration <= 0) throw Error("scenario duration must be positive");
  if (!(frame_rate_hz > 0.0)) throw Error("scenario frame rate must be positive");
  if (!(noise_sigma >= 0.0)) throw Error("noise_sigma must be non-negative");
  auto in_range = [&](Micros s, Micros e, const char* what) {
    if (s < 0 || e > duration || s >= e) throw Error(std::string("scenario ") + what + " interval out of range");
  };
  for (const auto& seg : script) {
    in_range(seg.start, seg.end, "script");
    if (seg.label == ExpressionLabel::neutral) throw Error("script segments must be non-neutral");
    if (!(seg.intensity > 0.0 && seg.intensity <= 1.0)) throw Error("script intensity must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < script.size(); ++i) {
    for (std::size_t j = i + 1; j < script.size(); ++j) {
      const auto& a = script[i];
      const auto& b = script[j];
      if (a.label == b.label && a.start < b.end && b.start < a.end) {
        throw Error("script segments of the same label overlap");
      }
    }
  }
  for (const auto& g : face_gaps) in_range(g.start, g.end, "face gap");
  for (const auto& s : speech) in_range(s.start, s.end, "speech");
  for (const auto& p : pose_script) {
    in_range(p.start, p.end, "pose");
    for (double a : {p.yaw, p.pitch, p.roll}) {
      if (!(a >= -90.0 && a <= 90.0)) throw Error("pose angles must lie in [-90, 90]");
    }
  }
}

double segment_weight(const ScriptSegment& seg, Micros t) {
  if (t < seg.start || t > seg.end) return 0.0;
  const double ramp = static_cast<double>(kRampDuration);
  return seg.intensity * smoothstep(static_cast<double>(t - seg.start) / ramp) *
         smoothstep(static_cast<double>(seg.end - t) / ramp);
}

GeneratedSession generate(const Scenario& sc, const vision::ReferenceFaceModel& model,
                          const ExpressionTemplates& templates) {
  sc.validate();
  GeneratedSession out;
  out.meta = SessionMeta{sc.session_id, sc.subject, sc.started_at, sc.frame_rate_hz, std::nullopt};
  out.speech = sc.speech;
  std::sort(out.speech.begin(), out.speech.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  out.game_trials = sc.game_trials;
  for (const auto& seg : sc.script) {
    out.ground_truth.push_back(ExpressiveEvent{seg.label, seg.start, seg.end, seg.start, seg.intensity});
  }
  std::sort(out.ground_truth.begin(), out.ground_truth.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> noise(0.0, sc.noise_sigma * kPixelsPerUnit);

  for (std::int64_t k = 0;; ++k) {
    const Micros t = std::llround(static_cast<double>(k) * 1e6 / sc.frame_rate_hz);
    if (t >= sc.duration) break;
    LandmarkFrame frame;
    frame.timestamp = t;
    frame.face_present =
        std::none_of(sc.face_gaps.begin(), sc.face_gaps.end(), [&](const auto& g) { return inside(t, g.start, g.end); });
    if (!frame.face_present) {
      out.frames.push_back(frame);
      continue;
    }

    std::array<double, kLabelCount> weights{};
    for (const auto& seg : sc.script) weights[label_index(seg.label)] += segment_weight(seg, t);
    const auto pts3 = deform(model, templates, weights);

    HeadPoseSample pose{t, 0.0, 0.0, 0.0};
    for (const auto& p : sc.pose_script) {
      if (inside(t, p.start, p.end)) pose = HeadPoseSample{t, p.yaw, p.pitch, p.roll};
    }
    const auto r = vision::rotation_from_euler(pose.yaw, pose.pitch, pose.roll);
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      const auto& p = pts3[i];
      const double x = r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z;
      const double y = r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z;
      frame.points[i] = Point2{kImageCenter.x + kPixelsPerUnit * x, kImageCenter.y - kPixelsPerUnit * y};
    }
    if (sc.noise_sigma > 0.0) {
      for (auto& p : frame.points) {
        p.x += noise(rng);
        p.y += noise(rng);
      }
    }
    frame.face_box = bounding_box(frame.points);
    out.frames.push_back(frame);
    out.poses.push_back(pose);
  }
  return out;
}

SessionJournal recording_journal(const GeneratedSession& session, Micros session_end) {
  SessionJournal j;
  j.records.push_back(session.meta);
  for (std::size_t i = 0; i < session.frames.size(); ++i) {
    j.records.push_back(FrameMeta{session.frames[i].timestamp, static_cast<std::int64_t>(i), std::nullopt});
    j.records.push_back(session.frames[i]);
  }
  for (const auto& s : session.speech) j.records.push_back(s);
  for (const auto& g : session.game_trials) j.records.push_back(g);
  SessionMeta end = session.meta;
  end.session_end = session_end;
  j.records.push_back(end);
  return j;
}

affect::LabeledDataset make_training_set(int per_class_count, double noise_sigma, std::uint64_t seed) {
  if (per_class_count < 1) throw Error("per_class_count must be at least 1");
  affect::LabeledDataset data(vision::kFeatureLength, "synth templates v" + std::to_string(kTemplateVersion) +
                                                          ", " + std::to_string(per_class_count) + "/class, sigma " +
                                                          std::to_string(noise_sigma) + ", seed " +
                                                          std::to_string(seed));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma * kPixelsPerUnit);
  const auto& model = vision::builtin_reference_model();
  const auto& templates = ExpressionTemplates::builtin();
  for (auto label : kAllLabels) {
    const LandmarkSet base = template_projection(label, model, templates);
    for (int i = 0; i < per_class_count; ++i) {
      LandmarkSet pts = base;
      if (noise_sigma > 0.0) {
        for (auto& p : pts) {
          p.x += noise(rng);
          p.y += noise(rng);
        }
      }
      data.add(vision::extract_features(vision::normalize_points(pts)), label);
    }
  }
  return data;
}

Scenario random_scenario(std::uint64_t seed, Micros duration, double noise_sigma) {
  std::mt19937_64 rng(seed);
  auto uniform_ms = [&](int lo, int hi) {
    return std::uniform_int_distribution<Micros>(lo, hi)(rng) * kMicrosPerMilli;
  };
  Scenario sc;
  sc.session_id = "synth-" + std::to_string(seed);
  sc.subject = "synth-subject";
  sc.duration = duration;
  sc.noise_sigma = noise_sigma;
  sc.seed = seed;

  std::uniform_int_distribution<int> pick_label(1, static_cast<int>(kLabelCount) - 1);
  std::bernoulli_distribution coin(0.4);
  Micros t = uniform_ms(1000, 2000);
  while (true) {
    const Micros len = uniform_ms(1500, 4000);
    if (t + len > duration - kMicrosPerSecond) break;
    auto label = static_cast<ExpressionLabel>(pick_label(rng));
    sc.script.push_back(ScriptSegment{label, t, t + len, 1.0});
    if (coin(rng)) {
      sc.pose_script.push_back(PoseSegment{t, t + len, std::uniform_real_distribution<double>(-10, 10)(rng),
                                           std::uniform_real_distribution<double>(-5, 5)(rng),
                                           std::uniform_real_distribution<double>(-5, 5)(rng)});
    }
    const Micros gap = uniform_ms(1500, 3000);
    if (coin(rng)) {
      const Micros g0 = t + len + 500 * kMicrosPerMilli;
      sc.face_gaps.push_back(TimeSpan{g0, g0 + uniform_ms(200, 500)});
    }
    t += len + gap;
  }
  Micros s = uniform_ms(0, 3000);
  while (s + 2 * kMicrosPerSecond < duration) {
    const Micros len = uniform_ms(800, 4000);
    sc.speech.push_back(SpeechActivitySpan{"caregiver", s, std::min(duration, s + len)});
    s += len + uniform_ms(500, 4000);
  }
  return sc;
}

namespace {

Micros ms_field(const Json& j, const char* key) {
  return static_cast<Micros>(std::llround(j.at(key).get<double>() * 1000.0));
}

double ms(Micros us) { return static_cast<double>(us) / 1000.0; }

}  // namespace

Json to_json(const Scenario& sc) {
  Json script = Json::array();
  for (const auto& s : sc.script) {
    script.push_back(Json{{"label", label_name(s.label)}, {"start_ms", ms(s.start)}, {"end_ms", ms(s.end)},
                          {"intensity", s.intensity}});
  }
  Json gaps = Json::array();
  for (const auto& g : sc.face_gaps) gaps.push_back(Json{{"start_ms", ms(g.start)}, {"end_ms", ms(g.end)}});
  Json speech = Json::array();
  for (const auto& s : sc.speech) {
    speech.push_back(Json{{"speaker_id", s.speaker_id}, {"start_ms", ms(s.start)}, {"end_ms", ms(s.end)}});
  }
  Json pose = Json::array();
  for (const auto& p : sc.pose_script) {
    pose.push_back(Json{{"start_ms", ms(p.start)}, {"end_ms", ms(p.end)}, {"yaw", p.yaw}, {"pitch", p.pitch},
                        {"roll", p.roll}});
  }
  Json games = Json::array();
  for (const auto& g : sc.game_trials) {
    games.push_back(Json{{"prompted", label_name(g.prompted_label)}, {"responded", label_name(g.responded_label)}});
  }
  return Json{{"session_id", sc.session_id},   {"subject", sc.subject},         {"started_at", sc.started_at},
              {"duration_ms", ms(sc.duration)}, {"frame_rate_hz", sc.frame_rate_hz}, {"script", script},
              {"face_gaps", gaps},              {"speech", speech},              {"pose_script", pose},
              {"noise_sigma", sc.noise_sigma},  {"seed", sc.seed},               {"game_trials", games}};
}

Scenario scenario_from_json(const Json& doc) {
  try {
    static const std::vector<std::string> known = {"session_id", "subject",     "started_at",  "duration_ms",
                                                   "frame_rate_hz", "script",   "face_gaps",   "speech",
                                                   "pose_script", "noise_sigma", "seed",       "game_trials"};
    for (const auto& [key, value] : doc.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) throw Error("unknown scenario key '" + key + "'");
    }
    Scenario sc;
    sc.session_id = doc.value("session_id", sc.session_id);
    sc.subject = doc.value("subject", sc.subject);
    sc.started_at = doc.value("started_at", sc.started_at);
    sc.duration = ms_field(doc, "duration_ms");
    sc.frame_rate_hz = doc.value("frame_rate_hz", sc.frame_rate_hz);
    sc.noise_sigma = doc.value("noise_sigma", 0.0);
    sc.seed = doc.value("seed", std::uint64_t{1});
    for (const auto& s : doc.value("script", Json::array())) {
      sc.script.push_back(ScriptSegment{label_from_name(s.at("label").get<std::string>()), ms_field(s, "start_ms"),
                                        ms_field(s, "end_ms"), s.value("intensity", 1.0)});
    }
    for (const auto& g : doc.value("face_gaps", Json::array())) {
      sc.face_gaps.push_back(TimeSpan{ms_field(g, "start_ms"), ms_field(g, "end_ms")});
    }
    for (const auto& s : doc.value("speech", Json::array())) {
      sc.speech.push_back(
          SpeechActivitySpan{s.at("speaker_id").get<std::string>(), ms_field(s, "start_ms"), ms_field(s, "end_ms")});
    }
    for (const auto& p : doc.value("pose_script", Json::array())) {
      sc.pose_script.push_back(PoseSegment{ms_field(p, "start_ms"), ms_field(p, "end_ms"), p.value("yaw", 0.0),
                                           p.value("pitch", 0.0), p.value("roll", 0.0)});
    }
    std::int64_t index = 0;
    for (const auto& g : doc.value("game_trials", Json::array())) {
      sc.game_trials.push_back(GameTrial{sc.session_id, index++, label_from_name(g.at("prompted").get<std::string>()),
                                         label_from_name(g.at("responded").get<std::string>())});
    }
    sc.validate();
    return sc;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario " + path.string());
  try {
    return scenario_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error("scenario " + path.string() + ": " + e.what());
  }
}

}  // namespace sia::synth
