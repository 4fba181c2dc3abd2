#include "sia/pipeline/session.hpp"

#include <algorithm>

#include "sia/metrics/engagement.hpp"

namespace sia::pipeline {

SessionRecorder::SessionRecorder(SessionMeta meta, const events::EventsConfig& config,
                                 std::optional<std::filesystem::path> journal_path, bool keep_records)
    : meta_(std::move(meta)), temporal_(config), keep_(keep_records) {
  meta_.session_end.reset();
  if (journal_path) writer_.emplace(JournalWriter::create(*journal_path));
  emit(meta_);
  flush();
}

void SessionRecorder::emit(const Record& record) {
  guard_.check(record, guard_.count());
  guard_.accept(record);
  if (writer_) unwritten_.push_back(record);
  if (keep_) journal_.records.push_back(record);
}

// One write per frame keeps the syscall count flat.
void SessionRecorder::flush() {
  if (!writer_ || unwritten_.empty()) return;
  writer_->append_all(unwritten_);
  unwritten_.clear();
}

void SessionRecorder::emit_output(const TemporalOutput& out) {
  for (const auto& cue : out.cues) emit(cue);
  for (const auto& ev : out.events) emit(ev);
}

TemporalOutput SessionRecorder::record_frame(const LandmarkFrame& frame, const FrameAnalysis& analysis,
                                             const std::optional<std::string>& blob_hash) {
  if (finalized_) throw Error("session already finalized");
  if (last_frame_ && frame.timestamp <= *last_frame_) throw Error("frame timestamps must strictly increase");
  last_frame_ = frame.timestamp;
  emit(FrameMeta{frame.timestamp, frame_index_++, blob_hash});
  emit(frame);
  if (analysis.scores) emit(*analysis.scores);
  if (analysis.pose) emit(*analysis.pose);
  auto out = temporal_.push(frame.timestamp, analysis.scores);
  emit_output(out);
  flush();
  return out;
}

TemporalOutput SessionRecorder::finalize(Micros session_end) {
  if (finalized_) throw Error("session already finalized");
  auto out = temporal_.finish();
  emit_output(out);
  std::stable_sort(speech_.begin(), speech_.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (const auto& s : speech_) emit(s);
  std::stable_sort(trials_.begin(), trials_.end(),
                   [](const auto& a, const auto& b) { return a.trial_index < b.trial_index; });
  for (const auto& t : trials_) emit(t);
  SessionMeta end = meta_;
  end.session_end = session_end;
  emit(end);
  flush();
  if (writer_) writer_->close();
  finalized_ = true;
  return out;
}

ReplayInput replay_input(const SessionJournal& recording) {
  ReplayInput in;
  in.meta = recording.meta();
  in.meta.session_end.reset();
  in.session_end = recording.declared_session_end();
  std::optional<FrameMeta> last_meta;
  for (const auto& r : recording.records) {
    if (const auto* fm = std::get_if<FrameMeta>(&r)) {
      last_meta = *fm;
    } else if (const auto* f = std::get_if<LandmarkFrame>(&r)) {
      in.frames.push_back(*f);
      in.blob_hashes.push_back(last_meta && last_meta->timestamp == f->timestamp ? last_meta->blob_hash
                                                                                  : std::nullopt);
    } else if (const auto* s = std::get_if<SpeechActivitySpan>(&r)) {
      in.speech.push_back(*s);
    } else if (const auto* g = std::get_if<GameTrial>(&r)) {
      in.game_trials.push_back(*g);
    }
  }
  return in;
}

Micros replay_session_end(const ReplayInput& input) {
  if (input.session_end) return *input.session_end;
  if (input.frames.empty()) return 0;
  return input.frames.back().timestamp + metrics::frame_period(input.meta.frame_rate_hz);
}

SessionJournal replay_session(const ReplayInput& input, const FrameAnalyzer& analyzer,
                              const events::EventsConfig& config,
                              const std::optional<std::filesystem::path>& journal_path) {
  const auto analyses = analyze_batch(input.frames, analyzer);
  SessionRecorder rec(input.meta, config, journal_path);
  for (std::size_t i = 0; i < input.frames.size(); ++i) {
    rec.record_frame(input.frames[i], analyses[i], i < input.blob_hashes.size() ? input.blob_hashes[i] : std::nullopt);
  }
  for (const auto& s : input.speech) rec.add_speech(s);
  for (const auto& g : input.game_trials) rec.add_game_trial(g);
  rec.finalize(replay_session_end(input));
  return rec.journal();
}

}  // namespace sia::pipeline
