#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sia/core/journal.hpp"
#include "sia/pipeline/analysis.hpp"
#include "sia/pipeline/temporal.hpp"

namespace sia::pipeline {

/// Drives the temporal stage and writes the session's records in journal
/// order. Records go to an optional file and/or are kept in memory.
class SessionRecorder {
 public:
  SessionRecorder(SessionMeta meta, const events::EventsConfig& config,
                  std::optional<std::filesystem::path> journal_path = std::nullopt, bool keep_records = true);

  /// Frames must arrive in strictly increasing timestamp order.
  TemporalOutput record_frame(const LandmarkFrame& frame, const FrameAnalysis& analysis,
                              const std::optional<std::string>& blob_hash = std::nullopt);

  void add_speech(SpeechActivitySpan span) { speech_.push_back(std::move(span)); }
  void add_game_trial(GameTrial trial) { trials_.push_back(std::move(trial)); }

  /// Flushes open events, side records and the finalizing SessionMeta.
  /// Returns the events released by the flush.
  TemporalOutput finalize(Micros session_end);

  std::optional<Micros> last_frame_timestamp() const { return last_frame_; }
  std::int64_t frame_count() const { return frame_index_; }
  bool finalized() const { return finalized_; }
  /// In-memory records (empty unless keep_records).
  const SessionJournal& journal() const { return journal_; }

 private:
  void emit(const Record& record);
  void emit_output(const TemporalOutput& out);
  void flush();

  SessionMeta meta_;
  TemporalStage temporal_;
  std::optional<JournalWriter> writer_;
  std::vector<Record> unwritten_;
  bool keep_;
  SessionJournal journal_;
  RecordOrderGuard guard_;
  std::int64_t frame_index_ = 0;
  std::optional<Micros> last_frame_;
  std::vector<SpeechActivitySpan> speech_;
  std::vector<GameTrial> trials_;
  bool finalized_ = false;
};

/// Everything a recording carries into a replay.
struct ReplayInput {
  SessionMeta meta;
  std::vector<LandmarkFrame> frames;
  std::vector<std::optional<std::string>> blob_hashes;  // parallel to frames
  std::vector<SpeechActivitySpan> speech;
  std::vector<GameTrial> game_trials;
  std::optional<Micros> session_end;
};

ReplayInput replay_input(const SessionJournal& recording);

/// Declared session end, else last frame plus one frame period.
Micros replay_session_end(const ReplayInput& input);

/// Batch analysis (OpenMP) followed by the sequential stage.
SessionJournal replay_session(const ReplayInput& input, const FrameAnalyzer& analyzer,
                              const events::EventsConfig& config,
                              const std::optional<std::filesystem::path>& journal_path = std::nullopt);

}  // namespace sia::pipeline
