#include "helpers.hpp"
#include "sia/events/config.hpp"
#include "sia/metrics/engagement.hpp"
#include "sia/pipeline/analysis.hpp"
#include "sia/pipeline/session.hpp"
#include "sia/pipeline/temporal.hpp"
#include "sia/synth/scenario.hpp"

using namespace sia;
using namespace sia::pipeline;
using sia::test::peaked;
using sia::test::TempDir;

namespace {

constexpr Micros kS = kMicrosPerSecond;

const FrameAnalyzer& analyzer() {
  static const FrameAnalyzer a(vision::builtin_reference_model(), sia::test::default_model());
  return a;
}

synth::GeneratedSession session(std::uint64_t seed, Micros duration = 20 * kS) {
  return synth::generate(synth::random_scenario(seed, duration, 0.002));
}

}  // namespace

TEST_CASE("batch analysis equals the serial reference") {
  auto gen = session(3);
  gen.frames[5].points[36] = gen.frames[5].points[42] = gen.frames[5].points[37];  // odd geometry stays per-frame
  const auto par = analyze_batch(gen.frames, analyzer());
  const auto ser = analyze_batch_serial(gen.frames, analyzer());
  CHECK(par == ser);
  std::size_t faces = 0;
  for (std::size_t i = 0; i < gen.frames.size(); ++i) {
    faces += gen.frames[i].face_present;
    if (!gen.frames[i].face_present) CHECK_FALSE(par[i].scores.has_value());
  }
  CHECK(faces > 0);
}

TEST_CASE("frames without a face produce no analysis") {
  LandmarkFrame none;
  const auto a = analyzer().analyze(none);
  CHECK_FALSE(a.scores.has_value());
  CHECK_FALSE(a.pose.has_value());
}

TEST_CASE("temporal stage closes events at face gaps") {
  TemporalStage stage(events::EventsConfig{});
  std::vector<ExpressiveEvent> evs;
  std::vector<Cue> cues;
  auto take = [&](const TemporalOutput& o) {
    evs.insert(evs.end(), o.events.begin(), o.events.end());
    cues.insert(cues.end(), o.cues.begin(), o.cues.end());
  };
  Micros t = 0;
  for (; t < 2 * kS; t += 33333) take(stage.push(t, ClassScores{t, peaked(ExpressionLabel::surprise, 0.95)}));
  const Micros last_face = t - 33333;
  for (; t < 3 * kS; t += 33333) take(stage.push(t, std::nullopt));
  take(stage.finish());
  REQUIRE(evs.size() == 1);
  CHECK(evs[0].end == last_face);
  REQUIRE(cues.size() == 1);
  CHECK(cues[0].issued_at == evs[0].confirmed_at);
}

TEST_CASE("recorded journals keep per-kind order and round-trip to disk") {
  TempDir dir("pipe");
  const auto gen = session(11);
  const auto input = replay_input(synth::recording_journal(gen, 20 * kS));
  const auto mem = replay_session(input, analyzer(), events::EventsConfig{}, dir / "a.agsj");
  const auto disk = read_session(dir / "a.agsj");
  CHECK(disk == mem);
  CHECK(mem.declared_session_end() == 20 * kS);
  CHECK(std::holds_alternative<SessionMeta>(mem.records.front()));
  CHECK(std::holds_alternative<SessionMeta>(mem.records.back()));

  const auto evs = mem.collect<ExpressiveEvent>();
  for (std::size_t i = 1; i < evs.size(); ++i) CHECK(evs[i - 1].start <= evs[i].start);
  CHECK(mem.collect<FrameMeta>().size() == gen.frames.size());
  CHECK(mem.collect<ClassScores>().size() ==
        static_cast<std::size_t>(std::count_if(gen.frames.begin(), gen.frames.end(), [](auto& f) { return f.face_present; })));
  CHECK(mem.collect<Cue>().size() == evs.size());
}

TEST_CASE("replay is deterministic and idempotent on its own output") {
  const auto rec = synth::recording_journal(session(21), 20 * kS);
  const auto a = replay_session(replay_input(rec), analyzer(), events::EventsConfig{});
  const auto b = replay_session(replay_input(rec), analyzer(), events::EventsConfig{});
  CHECK(serialize_journal(a) == serialize_journal(b));
  // Replaying the processed journal reads the same frames and side data.
  const auto c = replay_session(replay_input(a), analyzer(), events::EventsConfig{});
  CHECK(serialize_journal(c) == serialize_journal(a));
}

TEST_CASE("replay session end fallbacks") {
  ReplayInput in;
  CHECK(replay_session_end(in) == 0);
  LandmarkFrame f;
  f.timestamp = 1000;
  in.frames.push_back(f);
  in.meta.frame_rate_hz = 30.0;
  CHECK(replay_session_end(in) == 1000 + 33333);
  in.session_end = 5000;
  CHECK(replay_session_end(in) == 5000);
}

TEST_CASE("recorder refuses out-of-order frames and use after finalize") {
  SessionRecorder rec(SessionMeta{"r", "s", "2024-01-01T00:00:00Z", 30.0, std::nullopt}, events::EventsConfig{});
  LandmarkFrame f;
  f.timestamp = 100;
  rec.record_frame(f, {});
  CHECK_THROWS_AS(rec.record_frame(f, {}), Error);
  rec.finalize(kS);
  CHECK(rec.finalized());
  f.timestamp = 200;
  CHECK_THROWS_AS(rec.record_frame(f, {}), Error);
  CHECK(rec.journal().declared_session_end() == kS);
}

TEST_CASE("processed journal feeds the engagement summary") {
  auto sc = synth::random_scenario(31, 20 * kS, 0.002);
  sc.speech = {{"mother", kS, 6 * kS}};
  const auto gen = synth::generate(sc);
  const auto j = replay_session(replay_input(synth::recording_journal(gen, sc.duration)), analyzer(), events::EventsConfig{});
  const auto m = metrics::session_summary(j);
  CHECK(m.frame_count == static_cast<std::int64_t>(gen.frames.size()));
  CHECK(m.pose.sample_count == m.face_frame_count);
  double truth = 0;
  for (const auto& p : gen.poses) truth += std::abs(p.yaw);
  CHECK(std::abs(m.pose.mean_abs_yaw - truth / static_cast<double>(gen.poses.size())) < 3.0);
  std::int64_t events = 0;
  for (auto c : m.event_counts) events += c;
  CHECK(events == static_cast<std::int64_t>(gen.ground_truth.size()));
}
