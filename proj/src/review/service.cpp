#include "sia/review/service.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "sia/core/highlights.hpp"
#include "sia/metrics/engagement.hpp"

namespace sia::review {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kJournalExt = ".agsj";
constexpr std::string_view kAnnotationSuffix = ".annotations.agsj";

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Response json_response(int status, const Json& body) { return Response{status, canonical_json(body)}; }

Response error_response(int status, const std::string& code, const std::string& message,
                        const std::optional<std::string>& field = std::nullopt) {
  Json err{{"code", code}, {"message", message}};
  if (field) err["field"] = *field;
  return json_response(status, Json{{"schema_version", kSchemaVersion}, {"error", err}});
}

std::string file_signature(const fs::path& p) {
  std::error_code ec;
  const auto size = fs::file_size(p, ec);
  if (ec) return {};
  const auto mtime = fs::last_write_time(p, ec);
  if (ec) return {};
  return std::to_string(size) + ":" + std::to_string(mtime.time_since_epoch().count());
}

std::size_t utf8_length(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string utc_now_iso() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json session_entry(const SessionJournal& j, const fs::path& path) {
  const auto& meta = j.meta();
  return Json{{"session_id", meta.session_id},
              {"subject", meta.subject},
              {"started_at", meta.started_at},
              {"frame_rate_hz", meta.frame_rate_hz},
              {"session_end_us", metrics::session_end_of(j)},
              {"finalized", j.declared_session_end().has_value()},
              {"frame_count", j.collect<LandmarkFrame>().size()},
              {"event_count", j.collect<ExpressiveEvent>().size()},
              {"file", path.filename().string()}};
}

}  // namespace

std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> out;
  if (n == 0 || max_points == 0) return out;
  const std::size_t stride = (n + max_points - 1) / max_points;
  for (std::size_t i = 0; i < n; i += stride) out.push_back(i);
  return out;
}

std::string annotation_store_path(const fs::path& journal) {
  auto stem = journal.filename().string();
  stem.resize(stem.size() - kJournalExt.size());
  return (journal.parent_path() / (stem + std::string(kAnnotationSuffix))).string();
}

ReviewService::ReviewService(fs::path data_dir) : data_dir_(std::move(data_dir)) {}

Response ReviewService::not_found(const std::string& what) { return error_response(404, "not_found", what); }

ReviewService::Scan ReviewService::scan() {
  std::error_code ec;
  std::vector<fs::path> files;
  for (fs::directory_iterator it(data_dir_, ec), end; !ec && it != end; it.increment(ec)) {
    const auto name = it->path().filename().string();
    if (it->is_regular_file() && ends_with(name, kJournalExt) && !ends_with(name, kAnnotationSuffix)) {
      files.push_back(it->path());
    }
  }
  if (ec) throw Error("cannot read data directory " + data_dir_.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  Scan out;
  std::set<std::string> seen;
  std::lock_guard lock(cache_mu_);
  for (const auto& path : files) {
    const auto sig = file_signature(path);
    auto it = journal_cache_.find(path);
    if (it == journal_cache_.end() || it->second.signature != sig) {
      try {
        auto journal = std::make_shared<const SessionJournal>(read_session(path, {.tolerate_truncated_tail = true}));
        (void)journal->meta();
        journal_cache_[path] = Entry{path, sig, std::move(journal)};
      } catch (const Error& e) {
        journal_cache_.erase(path);
        out.warnings.emplace_back(path.filename().string(), e.what());
        continue;
      }
      it = journal_cache_.find(path);
    }
    const auto& id = it->second.journal->meta().session_id;
    if (!seen.insert(id).second) {
      out.warnings.emplace_back(path.filename().string(), "duplicate session_id " + id);
      continue;
    }
    out.sessions.push_back(it->second);
  }
  std::sort(out.sessions.begin(), out.sessions.end(), [](const Entry& a, const Entry& b) {
    const auto& ma = a.journal->meta();
    const auto& mb = b.journal->meta();
    return ma.started_at != mb.started_at ? ma.started_at > mb.started_at : ma.session_id < mb.session_id;
  });
  return out;
}

std::optional<ReviewService::Entry> ReviewService::find(const std::string& session_id) {
  for (auto& e : scan().sessions) {
    if (e.journal->meta().session_id == session_id) return e;
  }
  return std::nullopt;
}

std::vector<Annotation> ReviewService::annotations_of(const Entry& entry) {
  const fs::path store = annotation_store_path(entry.path);
  if (!fs::exists(store)) return {};
  auto anns = read_session(store, {.tolerate_truncated_tail = true}).collect<Annotation>();
  std::stable_sort(anns.begin(), anns.end(), [](const Annotation& a, const Annotation& b) {
    return a.timestamp_in_session != b.timestamp_in_session ? a.timestamp_in_session < b.timestamp_in_session
                                                            : a.id < b.id;
  });
  return anns;
}

Response ReviewService::list_sessions() {
  Scan s;
  try {
    s = scan();
  } catch (const Error& e) {
    return error_response(500, "storage", e.what());
  }
  Json sessions = Json::array();
  for (const auto& e : s.sessions) sessions.push_back(session_entry(*e.journal, e.path));
  Json warnings = Json::array();
  for (const auto& [file, err] : s.warnings) warnings.push_back(Json{{"file", file}, {"error", err}});
  return json_response(200, Json{{"schema_version", kSchemaVersion}, {"sessions", sessions}, {"warnings", warnings}});
}

Response ReviewService::timeline(const std::string& session_id) {
  const auto entry = find(session_id);
  if (!entry) return not_found("session " + session_id);
  const auto& j = *entry->journal;
  const auto& meta = j.meta();
  const Micros end = metrics::session_end_of(j);

  const auto events = j.collect<ExpressiveEvent>();
  Json events_json = Json::array();
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto e = to_json(events[i]);
    e["index"] = i;
    events_json.push_back(e);
  }
  Json cues = Json::array();
  for (const auto& c : j.collect<Cue>()) cues.push_back(to_json(c));
  Json clips = Json::array();
  const auto highlight = detect_highlights(events, kHighlightPad, end);
  for (std::size_t i = 0; i < highlight.size(); ++i) {
    auto c = to_json(highlight[i]);
    c["index"] = i;
    clips.push_back(c);
  }
  Json visibility = Json::array();
  const auto frames = j.collect<LandmarkFrame>();
  for (const auto& s : metrics::visibility_timeline(frames, metrics::frame_period(meta.frame_rate_hz), end).spans) {
    visibility.push_back(Json{{"start_us", s.start}, {"end_us", s.end}});
  }
  const auto scores = j.collect<ClassScores>();
  const auto idx = downsample_indices(scores.size());
  Json ts = Json::array();
  Json tracks = Json::object();
  for (auto label : kAllLabels) tracks[std::string(label_name(label))] = Json::array();
  for (auto i : idx) {
    ts.push_back(scores[i].timestamp);
    for (auto label : kAllLabels) tracks[std::string(label_name(label))].push_back(scores[i][label]);
  }
  Json anns = Json::array();
  try {
    for (const auto& a : annotations_of(*entry)) anns.push_back(to_json(a));
  } catch (const Error& e) {
    return error_response(500, "storage", e.what());
  }
  return json_response(200, Json{{"schema_version", kSchemaVersion},
                                 {"session_id", meta.session_id},
                                 {"subject", meta.subject},
                                 {"started_at", meta.started_at},
                                 {"session_end_us", end},
                                 {"events", events_json},
                                 {"cues", cues},
                                 {"clips", clips},
                                 {"visibility", visibility},
                                 {"score_tracks", {{"timestamps_us", ts}, {"labels", tracks}}},
                                 {"annotations", anns}});
}

Response ReviewService::metrics(const std::string& session_id) {
  const auto entry = find(session_id);
  if (!entry) return not_found("session " + session_id);
  return json_response(200, to_json(metrics::session_summary(*entry->journal)));
}

Response ReviewService::highlight_frames(const std::string& session_id, const std::string& clip) {
  const auto entry = find(session_id);
  if (!entry) return not_found("session " + session_id);
  const auto& j = *entry->journal;
  const auto clips = detect_highlights(j.collect<ExpressiveEvent>(), kHighlightPad, metrics::session_end_of(j));
  std::size_t index = 0;
  try {
    std::size_t used = 0;
    index = std::stoul(clip, &used);
    if (used != clip.size()) throw std::invalid_argument(clip);
  } catch (const std::exception&) {
    return not_found("clip " + clip);
  }
  if (index >= clips.size()) return not_found("clip " + clip);
  const auto& c = clips[index];

  Json frames = Json::array();
  std::optional<FrameMeta> meta;
  for (const auto& r : j.records) {
    if (const auto* fm = std::get_if<FrameMeta>(&r)) {
      meta = *fm;
    } else if (const auto* f = std::get_if<LandmarkFrame>(&r)) {
      if (f->timestamp < c.start || f->timestamp >= c.end) continue;
      Json item{{"timestamp_us", f->timestamp}, {"landmarks", to_json(*f)}};
      if (meta && meta->timestamp == f->timestamp) {
        item["frame_index"] = meta->frame_index;
        item["blob_hash"] = meta->blob_hash ? Json(*meta->blob_hash) : Json(nullptr);
      }
      frames.push_back(item);
    }
  }
  auto clip_json = to_json(c);
  clip_json["index"] = index;
  return json_response(200, Json{{"schema_version", kSchemaVersion},
                                 {"session_id", j.meta().session_id},
                                 {"clip", clip_json},
                                 {"frames", frames}});
}

Response ReviewService::post_annotation(const std::string& session_id, const std::string& body) {
  const auto entry = find(session_id);
  if (!entry) return not_found("session " + session_id);

  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::exception&) {
    return error_response(400, "bad_request", "body is not JSON");
  }
  if (!doc.is_object()) return error_response(400, "bad_request", "body must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "author" && key != "timestamp_in_session_us" && key != "text") {
      return error_response(422, "validation", "unknown field", key);
    }
  }
  if (!doc.contains("text") || !doc["text"].is_string()) return error_response(422, "validation", "text required", "text");
  if (!doc.contains("timestamp_in_session_us") || !doc["timestamp_in_session_us"].is_number_integer()) {
    return error_response(422, "validation", "integer timestamp required", "timestamp_in_session_us");
  }
  if (doc.contains("author") && !doc["author"].is_string()) {
    return error_response(422, "validation", "author must be a string", "author");
  }
  Annotation a;
  a.session_id = session_id;
  a.author = doc.value("author", std::string("caregiver"));
  a.text = doc["text"].get<std::string>();
  a.timestamp_in_session = doc["timestamp_in_session_us"].get<Micros>();
  if (a.text.empty()) return error_response(422, "validation", "text must not be empty", "text");
  if (utf8_length(a.text) > kMaxAnnotationChars) {
    return error_response(422, "validation", "text longer than 2000 characters", "text");
  }
  const Micros end = metrics::session_end_of(*entry->journal);
  if (a.timestamp_in_session < 0 || a.timestamp_in_session > end) {
    return error_response(422, "out_of_range", "timestamp outside [0, " + std::to_string(end) + "]",
                          "timestamp_in_session_us");
  }

  std::lock_guard lock(append_mu_);
  const fs::path store = annotation_store_path(entry->path);
  try {
    std::int64_t next_id = 1;
    if (fs::exists(store)) {
      for (const auto& old : read_session(store).collect<Annotation>()) next_id = std::max(next_id, old.id + 1);
    }
    a.id = next_id;
    a.created_at = utc_now_iso();
    auto writer = fs::exists(store) ? JournalWriter::open_append(store) : JournalWriter::create(store);
    if (writer.record_count() == 0) {
      SessionMeta meta = entry->journal->meta();
      meta.session_end.reset();
      writer.append(meta);
    }
    writer.append(a);
    writer.close();
  } catch (const Error& e) {
    return error_response(500, "storage", e.what());
  }
  return json_response(201, to_json(a));
}

Response ReviewService::progress(const std::string& subject) {
  Scan s;
  try {
    s = scan();
  } catch (const Error& e) {
    return error_response(500, "storage", e.what());
  }
  std::string signature;
  std::vector<const Entry*> mine;
  for (const auto& e : s.sessions) {
    if (e.journal->meta().subject != subject) continue;
    mine.push_back(&e);
    signature += e.path.string() + "=" + e.signature + ";";
  }
  if (mine.empty()) return not_found("subject " + subject);
  {
    std::lock_guard lock(cache_mu_);
    if (auto it = progress_cache_.find(subject); it != progress_cache_.end() && it->second.first == signature) {
      return Response{200, it->second.second};
    }
  }
  std::vector<metrics::EngagementMetrics> sessions;
  for (const auto* e : mine) sessions.push_back(metrics::session_summary(*e->journal));
  auto body = canonical_json(to_json(metrics::progress_series(subject, std::move(sessions))));
  std::lock_guard lock(cache_mu_);
  progress_cache_[subject] = {signature, body};
  return Response{200, body};
}

}  // namespace sia::review
