#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sia/core/records.hpp"

namespace sia {

/// CRC-32/ISO-HDLC (the zlib/PNG polynomial, reflected, init and xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed = 0);

inline constexpr std::array<std::uint8_t, 4> kJournalMagic = {'A', 'G', 'S', 'J'};
inline constexpr std::uint16_t kJournalVersion = 1;
inline constexpr std::size_t kJournalHeaderSize = 6;
/// kind u8 + payload_length u32 before the payload, crc32 u32 after it.
inline constexpr std::size_t kRecordOverhead = 9;

enum class JournalErrc {
  bad_magic,
  unsupported_version,
  crc_mismatch,
  truncated,
  malformed_record,
  out_of_order,
  closed,
  io,
};

std::string_view journal_errc_name(JournalErrc code);

class JournalError : public Error {
 public:
  JournalError(JournalErrc code, std::string message, std::optional<std::size_t> record_index = std::nullopt,
               std::optional<std::uint64_t> byte_offset = std::nullopt);

  JournalErrc code() const { return code_; }
  /// Zero-based index of the offending record (the SessionMeta is record 0).
  std::optional<std::size_t> record_index() const { return record_index_; }
  std::optional<std::uint64_t> byte_offset() const { return byte_offset_; }

 private:
  JournalErrc code_;
  std::optional<std::size_t> record_index_;
  std::optional<std::uint64_t> byte_offset_;
};

/// A complete, immutable view of one session's records in file order.
struct SessionJournal {
  std::vector<Record> records;

  /// The leading SessionMeta. Throws if the journal has none.
  const SessionMeta& meta() const;
  /// session_end from the last finalizing SessionMeta, if the journal was finalized.
  std::optional<Micros> declared_session_end() const;

  template <class T>
  std::vector<T> collect() const {
    std::vector<T> out;
    for (const auto& r : records) {
      if (const T* v = std::get_if<T>(&r)) out.push_back(*v);
    }
    return out;
  }

  friend bool operator==(const SessionJournal&, const SessionJournal&) = default;
};

/// Enforces the per-kind ordering contract and the leading-SessionMeta rule.
class RecordOrderGuard {
 public:
  /// Throws JournalError(out_of_order / malformed_record) when `record` may not follow.
  void check(const Record& record, std::size_t record_index) const;
  void accept(const Record& record);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_ = 0;
  std::map<RecordKind, std::int64_t> last_key_;
};

/// Serializes one record to its framed form: kind, length, canonical JSON payload, crc.
std::vector<std::uint8_t> encode_record(const Record& record);
std::vector<std::uint8_t> encode_journal_header();

struct JournalReadOptions {
  /// Return the valid prefix instead of failing when the file ends mid-record.
  bool tolerate_truncated_tail = false;
};

SessionJournal parse_journal(std::span<const std::uint8_t> bytes, const JournalReadOptions& options = {});
SessionJournal read_session(const std::filesystem::path& path, const JournalReadOptions& options = {});

/// Single-writer, append-only journal file. Every append is framed, checksummed and flushed.
class JournalWriter {
 public:
  /// Creates (or truncates) `path` and writes the file header.
  static JournalWriter create(const std::filesystem::path& path);
  /// Opens an existing, valid journal for further appends.
  static JournalWriter open_append(const std::filesystem::path& path);

  JournalWriter(JournalWriter&&) noexcept = default;
  JournalWriter& operator=(JournalWriter&&) noexcept = default;
  ~JournalWriter() = default;

  void append(const Record& record);
  /// Appends several records with a single write and flush; all or none are accepted.
  void append_all(std::span<const Record> records);
  void close();
  bool is_open() const { return file_ != nullptr; }
  std::uint64_t position() const { return position_; }
  std::size_t record_count() const { return guard_.count(); }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
  };

  JournalWriter(std::unique_ptr<std::FILE, FileCloser> file, std::uint64_t position, RecordOrderGuard guard);

  std::unique_ptr<std::FILE, FileCloser> file_;
  std::uint64_t position_ = 0;
  RecordOrderGuard guard_;
};

/// Writes a whole journal in one go.
void write_session(const std::filesystem::path& path, const SessionJournal& journal);
std::vector<std::uint8_t> serialize_journal(const SessionJournal& journal);

}  // namespace sia
