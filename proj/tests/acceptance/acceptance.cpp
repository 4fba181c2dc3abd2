// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "../oracles.hpp"
#include "sia/config.hpp"
#include "sia/core/journal.hpp"
#include "sia/core/records.hpp"
#include "sia/link/protocol.hpp"
#include "sia/link/session.hpp"
#include "sia/link/transport.hpp"
#include "sia/metrics/engagement.hpp"
#include "sia/metrics/intervals.hpp"
#include "sia/pipeline/session.hpp"
#include "sia/synth/scenario.hpp"
#include "sia/vision/pose.hpp"

using namespace sia;

namespace {

constexpr Micros kS = kMicrosPerSecond;
constexpr Micros kMs = kMicrosPerMilli;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

const pipeline::FrameAnalyzer& analyzer() {
  static const affect::ClassifierModel model = default_classifier(AffectConfig{});
  static const pipeline::FrameAnalyzer a(vision::builtin_reference_model(), model);
  return a;
}

// Gradient correctness ------------------------------------------------------

Outcome gradient_check() {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<std::size_t> feats(1, 40), samples(1, 30);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto inst = oracle::random_instance(rng, feats(rng), samples(rng));
    const auto g = affect::gradient(inst.model, inst.data, inst.lambda);
    auto fd_at = [&](double& param) {
      const double keep = param;
      param = keep + h;
      const double up = oracle::oracle_objective(inst.model, inst.data, inst.lambda);
      param = keep - h;
      const double down = oracle::oracle_objective(inst.model, inst.data, inst.lambda);
      param = keep;
      return (up - down) / (2 * h);
    };
    for (std::size_t i = 0; i < inst.model.weights.size(); ++i) {
      worst = std::max(worst, oracle::rel_err(g.weights[i], fd_at(inst.model.weights[i])));
    }
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      worst = std::max(worst, oracle::rel_err(g.bias[k], fd_at(inst.model.bias[k])));
    }
  }
  return {worst < 1e-5, fmt("100 instances, max relative error %.3g (< 1e-5)", worst)};
}

// Classifier competence -------------------------------------------------------

Outcome classifier_check() {
  const AffectConfig cfg;
  const auto data = default_training_set(cfg);
  const auto model = affect::train(data, cfg.hyperparams);
  const auto eval = affect::evaluate(model, data);
  return {eval.accuracy >= 0.95,
          fmt("%zu samples, training accuracy %.4f (>= 0.95)", data.size(), eval.accuracy)};
}

// Segmentation oracle equivalence ---------------------------------------------

Outcome segmentation_check() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> frames(100, 1500);
  const events::SegmenterConfig cfg;
  std::size_t mismatches = 0, total_events = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto stream = oracle::random_score_stream(rng, frames(rng));
    const auto got = events::segment_events(stream, cfg);
    const auto want = oracle::segment(stream, cfg.enter_threshold, cfg.exit_threshold, cfg.min_duration);
    total_events += want.size();
    if (got != want) ++mismatches;
  }
  return {mismatches == 0 && total_events > 0,
          fmt("1000 streams, %zu oracle events, %zu mismatching streams", total_events, mismatches)};
}

// Cue-policy invariants -------------------------------------------------------

Outcome cue_check() {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<std::size_t> count(20, 300);
  std::uniform_int_distribution<int> cooldown_ms(500, 10000), rate(1, 20);
  std::size_t cooldown = 0, rate_v = 0, unjustified = 0, length_mismatch = 0, issued = 0, suppressed = 0;
  for (int i = 0; i < 100; ++i) {
    events::CuePolicyConfig cfg;
    if (i % 2 == 1) {
      cfg.per_label_cooldown = cooldown_ms(rng) * kMs;
      cfg.global_rate_limit = rate(rng);
    }
    const auto evs = oracle::random_schedule(rng, count(rng));
    const auto cues = events::decide_cues(evs, cfg);
    if (cues.size() != evs.size()) ++length_mismatch;
    const auto c = oracle::check_cues(evs, cues, cfg);
    cooldown += c.cooldown_violations;
    rate_v += c.rate_violations;
    unjustified += c.unjustified_suppressions;
    for (const auto& cue : cues) (cue.suppressed() ? suppressed : issued) += 1;
  }
  const bool ok = cooldown == 0 && rate_v == 0 && length_mismatch == 0 && unjustified == 0;
  return {ok, fmt("100 schedules, %zu issued / %zu suppressed; cooldown %zu, rate %zu, length %zu, "
                  "unjustified %zu violations",
                  issued, suppressed, cooldown, rate_v, length_mismatch, unjustified)};
}

// Pose recovery -------------------------------------------------------------

double angle_error(double a, double b) { return std::abs(std::remainder(a - b, 360.0)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome pose_check() {
  const auto& model = vision::builtin_reference_model();
  const vision::PoseEstimator est(model);
  constexpr double scale = 100.0;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.01 * scale);
  std::array<double, 3> worst{};
  std::array<std::vector<double>, 3> noisy;
  std::size_t poses = 0;
  for (int y = -40; y <= 40; y += 5) {
    for (int p = -40; p <= 40; p += 5) {
      for (int r = -40; r <= 40; r += 5) {
        auto frame = oracle::project(model, oracle::oracle_rotation(y, p, r), scale, {320, 240});
        const auto clean = est.estimate(frame);
        worst[0] = std::max(worst[0], angle_error(clean.yaw, y));
        worst[1] = std::max(worst[1], angle_error(clean.pitch, p));
        worst[2] = std::max(worst[2], angle_error(clean.roll, r));
        for (auto& pt : frame.points) {
          pt.x += noise(rng);
          pt.y += noise(rng);
        }
        const auto n = est.estimate(frame);
        noisy[0].push_back(angle_error(n.yaw, y));
        noisy[1].push_back(angle_error(n.pitch, p));
        noisy[2].push_back(angle_error(n.roll, r));
        ++poses;
      }
    }
  }
  const std::array<double, 3> med{median(noisy[0]), median(noisy[1]), median(noisy[2])};
  const bool ok = *std::max_element(worst.begin(), worst.end()) < 0.5 && *std::max_element(med.begin(), med.end()) < 3.0;
  return {ok, fmt("%zu poses; noiseless max yaw/pitch/roll %.2e/%.2e/%.2e deg (< 0.5); "
                  "sigma 0.01 median %.3f/%.3f/%.3f deg (< 3)",
                  poses, worst[0], worst[1], worst[2], med[0], med[1], med[2])};
}

// Interval-metric oracle --------------------------------------------------------

Outcome interval_check() {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> nspans(0, 12);
  std::uniform_int_distribution<std::int64_t> horizon_ms(1000, 60000);
  double worst = 0.0;
  std::size_t shape_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    const auto horizon = horizon_ms(rng);
    const auto face = oracle::random_ms_spans(rng, horizon, nspans(rng));
    const auto talk = oracle::random_ms_spans(rng, horizon, nspans(rng));
    metrics::SpanList list;
    for (const auto& s : face) list.push_back({s.start_ms * kMs, s.end_ms * kMs});
    const metrics::FaceVisibilityTimeline tl{metrics::normalize_spans(list)};
    std::vector<SpeechActivitySpan> speech;
    for (const auto& s : talk) speech.push_back({"caregiver", s.start_ms * kMs, s.end_ms * kMs});

    const auto gf = oracle::grid(face, horizon);
    const auto gt = oracle::grid(talk, horizon);
    worst = std::max(worst, std::abs(metrics::face_in_view_fraction(tl, horizon * kMs) - oracle::grid_fraction(gf, horizon)));
    const auto got = metrics::gaze_while_speaking(tl, speech);
    const auto want = oracle::grid_ratio(gf, gt);
    if (got.has_value() != want.has_value()) {
      ++shape_mismatch;
    } else if (got) {
      worst = std::max(worst, std::abs(*got - *want));
    }
  }
  return {worst < 1e-6 && shape_mismatch == 0,
          fmt("100 cases, max abs error %.3g (< 1e-6), %zu defined/undefined mismatches", worst, shape_mismatch)};
}

// End-to-end event recovery -----------------------------------------------------

Outcome end_to_end_check() {
  std::size_t scripted = 0, recovered = 0, detected = 0, spurious = 0;
  Micros worst_boundary = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Micros duration = 60 * kS;
    const auto sc = synth::random_scenario(seed, duration, 0.002);
    const auto gen = synth::generate(sc);
    const auto journal = pipeline::replay_session(pipeline::replay_input(synth::recording_journal(gen, duration)),
                                                  analyzer(), events::EventsConfig{});
    const auto found = journal.collect<ExpressiveEvent>();
    scripted += gen.ground_truth.size();
    detected += found.size();
    std::vector<bool> used(found.size(), false);
    for (const auto& truth : gen.ground_truth) {
      for (std::size_t i = 0; i < found.size(); ++i) {
        const Micros db = std::max(std::abs(found[i].start - truth.start), std::abs(found[i].end - truth.end));
        if (!used[i] && found[i].label == truth.label && db <= 250 * kMs) {
          used[i] = true;
          ++recovered;
          worst_boundary = std::max(worst_boundary, db);
          break;
        }
      }
    }
    spurious += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  }
  const double recall = scripted ? static_cast<double>(recovered) / static_cast<double>(scripted) : 0.0;
  return {recall >= 0.9 && spurious == 0 && scripted > 0,
          fmt("20 scenarios, %zu/%zu scripted events recovered (recall %.3f >= 0.9), worst boundary %.0f ms, "
              "%zu detected, %zu spurious",
              recovered, scripted, recall, static_cast<double>(worst_boundary) / 1000.0, detected, spurious)};
}

// Format robustness ---------------------------------------------------------

SessionMeta journal_meta() { return {"acc", "kid", "2024-06-01T08:00:00Z", 30.0, std::nullopt}; }

SessionJournal random_journal(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> kind(0, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 50.0);
  SessionJournal j;
  j.records.push_back(journal_meta());
  Micros t = 0;
  std::int64_t idx = 0;
  while (j.records.size() < n) {
    t += 1 + static_cast<Micros>(u(rng) * 40000);
    const auto label = static_cast<ExpressionLabel>(1 + static_cast<int>(u(rng) * 7));
    switch (kind(rng)) {
      case 0: j.records.push_back(FrameMeta{t, idx++, u(rng) < 0.3 ? std::optional<std::string>("cafe01") : std::nullopt}); break;
      case 1: {
        LandmarkFrame f;
        f.timestamp = t;
        f.face_present = u(rng) < 0.9;
        if (f.face_present) {
          for (auto& p : f.points) p = {320 + g(rng), 240 + g(rng)};
          if (u(rng) < 0.5) f.face_box = Rect{10 * u(rng), 10 * u(rng), 100, 120};
        }
        j.records.push_back(f);
        break;
      }
      case 2: {
        ScoreArray s;
        double sum = 0;
        for (auto& v : s) sum += (v = u(rng) + 1e-3);
        for (auto& v : s) v /= sum;
        j.records.push_back(ClassScores{t, s});
        break;
      }
      case 3: j.records.push_back(ExpressiveEvent{label, t, t + 700000, t + 500000, 0.65 + 0.35 * u(rng)}); break;
      case 4:
        j.records.push_back(Cue{label, t, u(rng) < 0.5 ? CueChannel::visual : CueChannel::audio,
                                u(rng) < 0.5 ? std::optional(SuppressReason::rate_limit) : std::nullopt});
        break;
      case 5: j.records.push_back(HeadPoseSample{t, 80 * u(rng) - 40, 40 * u(rng) - 20, 10 * u(rng) - 5}); break;
      case 6: j.records.push_back(SpeechActivitySpan{"caregiver", t, t + 2000}); break;
      case 7:
        j.records.push_back(Annotation{idx++, "acc", "parent", t, "looked \"up\" \xc3\xa0 la fin", "2024-06-01T09:00:00Z"});
        break;
      case 8: j.records.push_back(GameTrial{"acc", idx++, label, u(rng) < 0.5 ? label : ExpressionLabel::neutral}); break;
    }
  }
  return j;
}

link::Message random_message(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> type(1, 8), len(0, 400), byte(0, 255);
  link::Message m;
  m.type = static_cast<link::MsgType>(type(rng));
  m.seq = static_cast<std::uint32_t>(rng());
  m.timestamp_us = rng();
  m.payload.resize(static_cast<std::size_t>(len(rng)));
  for (auto& b : m.payload) b = static_cast<std::uint8_t>(byte(rng));
  return m;
}

std::vector<std::uint8_t> encode_all(const std::vector<link::Message>& msgs) {
  std::vector<std::uint8_t> out;
  for (const auto& m : msgs) link::encode_into(m, out);
  return out;
}

Outcome format_check() {
  std::mt19937_64 rng(4242);
  std::vector<std::string> failures;

  // Journal: 10,000 records through a file and back.
  const auto dir = std::filesystem::temp_directory_path() / ("sia-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto journal = random_journal(rng, 10000);
  {
    auto w = JournalWriter::create(dir / "j.agsj");
    for (const auto& r : journal.records) w.append(r);
    w.close();
  }
  const auto back = read_session(dir / "j.agsj");
  if (back != journal) failures.push_back("journal records differ after round trip");
  if (serialize_journal(back) != serialize_journal(journal)) failures.push_back("journal bytes differ after re-encoding");
  std::filesystem::remove_all(dir);

  // Journal: every single-byte flip in a small file.
  const auto small = serialize_journal(random_journal(rng, 10));
  std::size_t journal_flips = 0, journal_caught = 0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    for (std::uint8_t mask : {0x01, 0x80, 0xFF}) {
      auto copy = small;
      copy[i] ^= mask;
      ++journal_flips;
      try {
        (void)parse_journal(copy);
      } catch (const JournalError&) {
        ++journal_caught;
      }
    }
  }

  // Protocol: 10,000 messages, raw and typed, in one buffer and trickled.
  std::vector<link::Message> msgs;
  const auto frames = synth::generate(synth::random_scenario(5, 60 * kS, 0.002)).frames;
  for (int i = 0; i < 10000; ++i) {
    if (i % 4 == 0) {
      msgs.push_back(link::make_landmark_frame(frames[static_cast<std::size_t>(i / 4) % frames.size()], static_cast<std::uint32_t>(i)));
    } else {
      msgs.push_back(random_message(rng));
    }
  }
  const auto wire = encode_all(msgs);
  const auto decoded = link::decode_all(wire);
  if (!decoded.errors.empty() || decoded.messages != msgs) failures.push_back("protocol messages differ after round trip");
  for (std::size_t i = 0; i < msgs.size(); i += 4) {
    if (link::parse_landmark_frame(decoded.messages[i]) != frames[(i / 4) % frames.size()]) {
      failures.push_back("landmark payload differs after round trip");
      break;
    }
  }
  link::StreamDecoder trickle;
  link::DecodeResult trickled;
  std::uniform_int_distribution<std::size_t> step(1, 97);
  for (std::size_t pos = 0; pos < wire.size();) {
    const auto n = std::min(step(rng), wire.size() - pos);
    trickle.feed(std::span(wire).subspan(pos, n), trickled);
    pos += n;
  }
  trickle.finish(trickled);
  if (trickled.messages != msgs) failures.push_back("chunked protocol decode differs");

  // Protocol: every single-byte flip over a small frame set.
  std::vector<link::Message> few{link::make_heartbeat(1, 100), link::make_cue({ExpressionLabel::fear, 5, CueChannel::visual, std::nullopt}, 2)};
  for (int i = 0; i < 3; ++i) {
    auto m = random_message(rng);
    m.payload.resize(m.payload.size() % 48);
    few.push_back(m);
  }
  const auto few_bytes = encode_all(few);
  std::size_t wire_flips = 0, wire_caught = 0;
  for (std::size_t i = 0; i < few_bytes.size(); ++i) {
    for (std::uint8_t mask : {0x01, 0x80, 0xFF}) {
      auto copy = few_bytes;
      copy[i] ^= mask;
      ++wire_flips;
      const auto res = link::decode_all(copy);
      bool only_originals = true;
      for (const auto& m : res.messages) only_originals &= std::find(few.begin(), few.end(), m) != few.end();
      if (!res.errors.empty() && only_originals) ++wire_caught;
    }
  }

  // Protocol: 1,000,000 bytes of seeded fuzz with planted frames.
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> fuzz;
  std::vector<link::Message> planted;
  while (fuzz.size() < 1000000) {
    for (int i = 0; i < 2000; ++i) fuzz.push_back(static_cast<std::uint8_t>(byte(rng)));
    if (byte(rng) < 64) fuzz.push_back(link::kMagic0);
    planted.push_back(random_message(rng));
    link::encode_into(planted.back(), fuzz);
  }
  fuzz.resize(1000000);
  const auto fuzzed = link::decode_all(fuzz);
  link::StreamDecoder chunked;
  link::DecodeResult chunk_result;
  std::uniform_int_distribution<std::size_t> chunk(1, 4096);
  for (std::size_t pos = 0; pos < fuzz.size();) {
    const auto n = std::min(chunk(rng), fuzz.size() - pos);
    chunked.feed(std::span(fuzz).subspan(pos, n), chunk_result);
    pos += n;
  }
  chunked.finish(chunk_result);
  std::size_t recovered = 0;
  for (const auto& p : planted) {
    recovered += std::find(fuzzed.messages.begin(), fuzzed.messages.end(), p) != fuzzed.messages.end();
  }
  // The final planted frame may be cut by the resize.
  if (recovered + 1 < planted.size()) failures.push_back("planted frames lost in fuzz");
  if (chunk_result.messages != fuzzed.messages) failures.push_back("chunked fuzz decode differs");

  if (journal_caught != journal_flips) failures.push_back("undetected journal flip");
  if (wire_caught != wire_flips) failures.push_back("undetected protocol flip");

  std::ostringstream detail;
  detail << "10000 journal records and " << msgs.size() << " messages round-trip; flips detected: journal "
         << journal_caught << "/" << journal_flips << ", protocol " << wire_caught << "/" << wire_flips
         << "; 1000000 fuzz bytes decoded (" << fuzzed.errors.size() << " errors, " << recovered << "/"
         << planted.size() << " planted frames recovered)";
  for (const auto& f : failures) detail << "; " << f;
  return {failures.empty(), detail.str()};
}

// Throughput ----------------------------------------------------------------

Outcome throughput_check() {
  constexpr Micros chunk_duration = 10 * 60 * kS;
  constexpr std::size_t chunks = 800;  // 8000 minutes
  const auto sc = synth::random_scenario(99, chunk_duration, 0.002);
  const auto gen = synth::generate(sc);
  const auto& an = analyzer();

  std::size_t frames = 0, events_out = 0, cues_out = 0;
  std::vector<LandmarkFrame> chunk(gen.frames.size());
  auto run = [&](std::size_t count, pipeline::SessionRecorder& rec) {
    for (std::size_t c = 0; c < count; ++c) {
      const Micros shift = static_cast<Micros>(c) * chunk_duration;
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        chunk[i] = gen.frames[i];
        chunk[i].timestamp += shift;
      }
      const auto analysis = pipeline::analyze_batch(chunk, an);
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        const auto out = rec.record_frame(chunk[i], analysis[i]);
        events_out += out.events.size();
        cues_out += out.cues.size();
      }
      frames += chunk.size();
    }
    const auto out = rec.finalize(static_cast<Micros>(count) * chunk_duration);
    events_out += out.events.size();
  };

  const auto t0 = Clock::now();
  pipeline::SessionRecorder rec(gen.meta, events::EventsConfig{}, std::nullopt, false);
  run(chunks, rec);
  const double elapsed = seconds_since(t0);
  const std::size_t total_frames = frames;
  const std::size_t total_events = events_out;

  // Informational: the same stream with every record encoded and written.
  frames = 0;
  const std::size_t sample_chunks = 3;
  const auto t1 = Clock::now();
  pipeline::SessionRecorder journaled(gen.meta, events::EventsConfig{}, std::filesystem::path("/dev/null"), false);
  run(sample_chunks, journaled);
  const double per_frame_journaled = seconds_since(t1) / static_cast<double>(frames);

  const bool ok = elapsed < 300.0 && total_frames == chunks * gen.frames.size() &&
                  total_events >= chunks * gen.ground_truth.size();
  return {ok, fmt("%zu frames (%.1f min of 30 Hz) in %.1f s (< 300 s), %.2f us/frame, %zu events, %zu cues; "
                  "with journal encoding %.2f us/frame (%.0f s extrapolated)",
                  total_frames, static_cast<double>(total_frames) / 30.0 / 60.0, elapsed,
                  elapsed * 1e6 / static_cast<double>(total_frames), total_events, cues_out,
                  per_frame_journaled * 1e6, per_frame_journaled * static_cast<double>(total_frames))};
}

// Latency -------------------------------------------------------------------

Outcome latency_check() {
  const Micros duration = 10 * kS;
  auto sc = synth::random_scenario(12, duration, 0.002);
  const auto gen = synth::generate(sc);
  const auto input = pipeline::replay_input(synth::recording_journal(gen, duration));
  const auto& an = analyzer();

  link::TcpListener listener("127.0.0.1", 0);
  link::DemoClientResult client_result;
  std::thread client([&] {
    auto t = link::tcp_connect("127.0.0.1", listener.port());
    client_result = link::run_demo_client(*t, input, link::DemoStreamOptions{std::nullopt, 1.0});
  });
  auto server = listener.accept(5 * kS);
  const auto result = link::run_link_session(*server, an, events::EventsConfig{});
  server->close();
  client.join();

  const auto p95 = link::percentile(result.stats.latency_ms, 95.0);
  const auto p50 = link::percentile(result.stats.latency_ms, 50.0);
  const auto worst = link::percentile(result.stats.latency_ms, 100.0);
  const bool complete = result.end == link::LinkEnd::session_end &&
                        result.stats.frames == static_cast<std::int64_t>(input.frames.size());
  return {complete && p95 && *p95 < 15.0,
          fmt("%lld frames at 30 Hz over TCP, end=%s, p50 %.3f ms, p95 %.3f ms (< 15 ms), max %.3f ms, %zu cues received",
              static_cast<long long>(result.stats.frames), std::string(link::link_end_name(result.end)).c_str(),
              p50.value_or(-1), p95.value_or(-1), worst.value_or(-1), client_result.cues.size())};
}

struct Criterion {
  std::string name;
  double budget_s;  // 0 = no runtime budget
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"gradient correctness", 10, gradient_check},
      {"classifier competence", 60, classifier_check},
      {"segmentation oracle equivalence", 30, segmentation_check},
      {"cue-policy invariants", 10, cue_check},
      {"pose recovery", 30, pose_check},
      {"interval-metric oracle", 0, interval_check},
      {"end-to-end event recovery", 0, end_to_end_check},
      {"format robustness", 0, format_check},
      {"throughput budget", 0, throughput_check},
      {"latency budget", 0, latency_check},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double took = seconds_since(t0);
    if (c.budget_s > 0 && took >= c.budget_s) {
      o.pass = false;
      o.detail += fmt("; runtime budget %.0f s exceeded", c.budget_s);
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << fmt(" [%.2f s]", took)
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (criteria.size() - static_cast<std::size_t>(failed)) << "/"
            << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
