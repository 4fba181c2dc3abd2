#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sia/core/journal.hpp"
#include "sia/metrics/progress.hpp"

namespace sia::review {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kMaxTrackPoints = 2000;
inline constexpr std::size_t kMaxAnnotationChars = 2000;
inline constexpr Micros kHighlightPad = 3 * kMicrosPerSecond;

struct Response {
  int status = 200;
  /// Canonical JSON.
  std::string body;
};

/// Uniform-stride indices 0, s, 2s, ... with s = ceil(n / max_points).
std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_points = kMaxTrackPoints);

std::string annotation_store_path(const std::filesystem::path& journal);

/// The review API over a directory of journals, independent of HTTP.
///
/// Session files are `*.agsj` in the data directory; `<stem>.annotations.agsj`
/// holds that session's annotations. Journals are read, never written.
/// Parsed journals and progress series are cached by file size and mtime.
class ReviewService {
 public:
  explicit ReviewService(std::filesystem::path data_dir);

  Response list_sessions();
  Response timeline(const std::string& session_id);
  Response metrics(const std::string& session_id);
  Response highlight_frames(const std::string& session_id, const std::string& clip);
  Response post_annotation(const std::string& session_id, const std::string& body);
  Response progress(const std::string& subject);

  static Response not_found(const std::string& what);

 private:
  struct Entry {
    std::filesystem::path path;
    std::string signature;
    std::shared_ptr<const SessionJournal> journal;
  };
  struct Scan {
    std::vector<Entry> sessions;
    std::vector<std::pair<std::string, std::string>> warnings;  // file, error
  };

  Scan scan();
  std::optional<Entry> find(const std::string& session_id);
  std::vector<Annotation> annotations_of(const Entry& entry);

  std::filesystem::path data_dir_;
  std::mutex cache_mu_;
  std::map<std::filesystem::path, Entry> journal_cache_;
  std::map<std::string, std::pair<std::string, std::string>> progress_cache_;  // subject -> (signature, body)
  std::mutex append_mu_;
};

/// HTTP binding of ReviewService under /api/v1.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewService& service);
  ~ReviewServer();

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& address, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sia::review
