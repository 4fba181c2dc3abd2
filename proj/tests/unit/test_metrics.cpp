#include "../oracles.hpp"
#include "helpers.hpp"
#include "sia/metrics/engagement.hpp"
#include "sia/metrics/progress.hpp"
#include "sia/synth/scenario.hpp"

using namespace sia;
using namespace sia::metrics;

namespace {

constexpr Micros kMs = kMicrosPerMilli;

FaceVisibilityTimeline timeline_of(std::span<const oracle::MsSpan> spans) {
  SpanList list;
  for (const auto& s : spans) list.push_back({s.start_ms * kMs, s.end_ms * kMs});
  return FaceVisibilityTimeline{normalize_spans(list)};
}

std::vector<SpeechActivitySpan> speech_of(std::span<const oracle::MsSpan> spans) {
  std::vector<SpeechActivitySpan> out;
  for (const auto& s : spans) out.push_back({"mother", s.start_ms * kMs, s.end_ms * kMs});
  return out;
}

SessionMeta meta(const std::string& id = "m1") { return {id, "kid", "2024-05-01T09:00:00Z", 30.0, std::nullopt}; }

}  // namespace

TEST_CASE("span algebra") {
  CHECK(normalize_spans({{5, 7}, {0, 2}, {2, 3}, {6, 9}, {4, 4}}) == SpanList{{0, 3}, {5, 9}});
  CHECK(intersect(SpanList{{0, 10}, {20, 30}}, SpanList{{5, 25}}) == SpanList{{5, 10}, {20, 25}});
  CHECK(clip(SpanList{{-5, 5}, {8, 20}}, 0, 10) == SpanList{{0, 5}, {8, 10}});
  CHECK(total_length(SpanList{{0, 3}, {5, 9}}) == 7);
}

TEST_CASE("face in view examples") {
  const Micros end = 10 * kMicrosPerSecond;
  CHECK(face_in_view_fraction(FaceVisibilityTimeline{{{0, end}}}, end) == 1.0);
  CHECK(face_in_view_fraction(FaceVisibilityTimeline{}, end) == 0.0);
  CHECK_THROWS_AS(face_in_view_fraction(FaceVisibilityTimeline{}, 0), Error);
}

TEST_CASE("gaze while speaking examples") {
  const Micros s = kMicrosPerSecond;
  std::vector<SpeechActivitySpan> speech{{"mother", 0, 10 * s}};
  CHECK(gaze_while_speaking(FaceVisibilityTimeline{{{0, 5 * s}}}, speech) == 0.5);
  CHECK(gaze_while_speaking(FaceVisibilityTimeline{{{0, 20 * s}}}, speech) == 1.0);
  CHECK_FALSE(gaze_while_speaking(FaceVisibilityTimeline{{{0, 5 * s}}}, {}).has_value());
}

TEST_CASE("interval metrics match the millisecond grid") {
  std::mt19937_64 rng(515);
  const std::int64_t horizon = 20000;
  for (int i = 0; i < 100; ++i) {
    const auto face = oracle::random_ms_spans(rng, horizon, 8);
    const auto talk = oracle::random_ms_spans(rng, horizon, 5);
    const auto tl = timeline_of(face);
    tl.validate(horizon * kMs);
    const auto gf = oracle::grid(face, horizon);
    const auto gt = oracle::grid(talk, horizon);
    CHECK(std::abs(face_in_view_fraction(tl, horizon * kMs) - oracle::grid_fraction(gf, horizon)) < 1e-6);
    const auto got = gaze_while_speaking(tl, speech_of(talk));
    const auto want = oracle::grid_ratio(gf, gt);
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(std::abs(*got - *want) < 1e-6);

    // Splitting every span in two leaves the answer unchanged.
    std::vector<oracle::MsSpan> split;
    for (const auto& sp : talk) {
      const auto mid = (sp.start_ms + sp.end_ms) / 2;
      split.push_back({mid, sp.end_ms});
      split.push_back({sp.start_ms, mid});
    }
    CHECK(gaze_while_speaking(tl, speech_of(split)) == got);
  }
}

TEST_CASE("visibility timeline from frames") {
  std::vector<LandmarkFrame> frames;
  for (int i = 0; i < 10; ++i) {
    LandmarkFrame f;
    f.timestamp = i * 100 * kMs;
    f.face_present = i < 3 || i >= 7;
    frames.push_back(f);
  }
  const auto tl = visibility_timeline(frames, 100 * kMs, 950 * kMs);
  CHECK(tl.spans == SpanList{{0, 300 * kMs}, {700 * kMs, 950 * kMs}});
  CHECK(frame_period(30.0) == 33333);
}

TEST_CASE("pose habits") {
  std::vector<HeadPoseSample> zero(5, HeadPoseSample{0, 0, 0, 0});
  auto h = pose_habits(zero);
  CHECK(h.mean_abs_yaw == 0.0);
  CHECK(h.facing_fraction == 1.0);
  CHECK(h.yaw_histogram[4] == 5);

  std::vector<HeadPoseSample> pm{{0, -20, 0, 0}, {1, 20, 0, 0}};
  h = pose_habits(pm);
  CHECK(h.mean_abs_yaw == 20.0);
  CHECK(h.facing_fraction == 0.0);
  CHECK(h.yaw_histogram[3] == 1);
  CHECK(h.yaw_histogram[5] == 1);

  CHECK(pose_habits({}).empty());
  CHECK(pose_habits(std::vector<HeadPoseSample>{{0, 90, 0, 0}}).yaw_histogram[8] == 1);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> yaw(-90, 90);
  std::vector<HeadPoseSample> random;
  for (int i = 0; i < 1000; ++i) random.push_back({i, yaw(rng), 0, 0});
  double sum = 0;
  std::int64_t facing = 0;
  std::array<std::int64_t, kYawBins> bins{};
  for (const auto& p : random) {
    sum += std::abs(p.yaw);
    facing += std::abs(p.yaw) <= 15.0;
    int b = 0;
    while (b < 8 && p.yaw >= -90.0 + 20.0 * (b + 1)) ++b;
    ++bins[static_cast<std::size_t>(b)];
  }
  h = pose_habits(random);
  CHECK(h.mean_abs_yaw == doctest::Approx(sum / 1000).epsilon(1e-12));
  CHECK(h.facing_fraction == static_cast<double>(facing) / 1000);
  CHECK(h.yaw_histogram == bins);
}

TEST_CASE("game accuracy trend") {
  auto trials = [](int correct, int total) {
    std::vector<GameTrial> v;
    for (int i = 0; i < total; ++i) {
      v.push_back({"s", i, ExpressionLabel::happiness, i < correct ? ExpressionLabel::happiness : ExpressionLabel::anger});
    }
    return v;
  };
  std::vector<std::vector<GameTrial>> sessions{trials(2, 4), trials(3, 4), trials(4, 4)};
  auto trend = game_accuracy_trend(sessions);
  CHECK(trend.accuracies == std::vector<double>{0.5, 0.75, 1.0});
  REQUIRE(trend.slope.has_value());
  CHECK(*trend.slope == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<std::vector<GameTrial>> perfect{trials(3, 3), trials(5, 5)};
  CHECK(*game_accuracy_trend(perfect).slope == 0.0);
  std::vector<std::vector<GameTrial>> single{trials(1, 2)};
  CHECK_FALSE(game_accuracy_trend(single).slope.has_value());
  std::vector<std::vector<GameTrial>> empty{trials(1, 2), {}};
  CHECK_THROWS_AS(game_accuracy_trend(empty), Error);
}

TEST_CASE("session summary of a journal without faces") {
  SessionJournal j;
  j.records.push_back(meta());
  for (int i = 0; i < 30; ++i) {
    j.records.push_back(FrameMeta{i * 33333, i, std::nullopt});
    LandmarkFrame f;
    f.timestamp = i * 33333;
    j.records.push_back(f);
  }
  j.records.push_back(SpeechActivitySpan{"mother", 0, 500000});
  auto end = meta();
  end.session_end = kMicrosPerSecond;
  j.records.push_back(end);
  const auto m = session_summary(j);
  CHECK(m.face_in_view_fraction == 0.0);
  CHECK_FALSE(m.gaze_while_speaking.at("mother").has_value());
  CHECK_FALSE(m.gaze_while_speaking_all.has_value());
  CHECK(m.session_end == kMicrosPerSecond);
  CHECK(m.frame_count == 30);

  SessionJournal none;
  none.records.push_back(LandmarkFrame{});
  CHECK_THROWS_AS(session_summary(none), JournalError);
}

TEST_CASE("policy_off events are counted but never cued") {
  SessionJournal j;
  j.records.push_back(meta());
  j.records.push_back(ExpressiveEvent{ExpressionLabel::fear, 0, 900000, 500000, 0.8});
  j.records.push_back(Cue{ExpressionLabel::fear, 500000, CueChannel::visual, SuppressReason::policy_off});
  const auto m = session_summary(j);
  CHECK(m.event_counts[label_index(ExpressionLabel::fear)] == 1);
  for (const auto& c : m.cue_counts) CHECK(c.issued == 0);
  CHECK(m.cue_counts[label_index(ExpressionLabel::fear)].suppressed == 1);
}

TEST_CASE("session summary matches the synthetic ground truth") {
  synth::Scenario sc;
  sc.duration = 20 * kMicrosPerSecond;
  sc.face_gaps = {{2 * kMicrosPerSecond, 5 * kMicrosPerSecond}, {12 * kMicrosPerSecond, 13 * kMicrosPerSecond}};
  sc.speech = {{"mother", kMicrosPerSecond, 4 * kMicrosPerSecond}, {"child", 10 * kMicrosPerSecond, 14 * kMicrosPerSecond}};
  const auto gen = synth::generate(sc);
  const auto j = synth::recording_journal(gen, sc.duration);
  const auto m = session_summary(j);

  // Ground truth from the frame grid: each frame covers the time up to the next one.
  const Micros period = frame_period(sc.frame_rate_hz);
  SpanList face;
  for (std::size_t i = 0; i < gen.frames.size(); ++i) {
    const auto& f = gen.frames[i];
    const Micros next = i + 1 < gen.frames.size() ? gen.frames[i + 1].timestamp : f.timestamp + period;
    if (f.face_present) face.push_back({f.timestamp, std::min(next, sc.duration)});
  }
  face = normalize_spans(face);
  CHECK(m.face_in_view_fraction == doctest::Approx(static_cast<double>(total_length(face)) / sc.duration).epsilon(1e-12));
  const SpanList mother{{kMicrosPerSecond, 4 * kMicrosPerSecond}};
  CHECK(*m.gaze_while_speaking.at("mother") ==
        doctest::Approx(static_cast<double>(total_length(intersect(face, mother))) / (3 * kMicrosPerSecond)).epsilon(1e-12));
  CHECK(session_summary(j).face_in_view_fraction == m.face_in_view_fraction);
  CHECK(to_json(session_summary(j)).dump() == to_json(m).dump());
}

TEST_CASE("progress series slopes") {
  std::vector<EngagementMetrics> sessions(3);
  const double acc[3] = {0.5, 0.75, 1.0};
  for (int i = 0; i < 3; ++i) {
    sessions[i].session_id = "s" + std::to_string(i);
    sessions[i].started_at = "2024-05-0" + std::to_string(3 - i) + "T00:00:00Z";
    sessions[i].game_accuracy = acc[2 - i];
    sessions[i].game_trials = 4;
  }
  const auto series = progress_series("kid", sessions);
  REQUIRE(series.points.size() == 3);
  CHECK(series.points[0].session_id == "s2");
  CHECK(*series.slopes.at("game_accuracy") == doctest::Approx(0.25).epsilon(1e-12));
}
