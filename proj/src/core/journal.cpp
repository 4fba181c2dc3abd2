#include "sia/core/journal.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "sia/core/bytes.hpp"

namespace sia {

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed) {
  uLong crc = seed;
  // zlib takes uInt lengths; feed in bounded chunks.
  constexpr std::size_t kChunk = 1u << 30;
  while (!bytes.empty()) {
    std::size_t n = std::min(bytes.size(), kChunk);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(n));
    bytes = bytes.subspan(n);
  }
  return static_cast<std::uint32_t>(crc);
}

std::string_view journal_errc_name(JournalErrc code) {
  switch (code) {
    case JournalErrc::bad_magic: return "bad_magic";
    case JournalErrc::unsupported_version: return "unsupported_version";
    case JournalErrc::crc_mismatch: return "crc_mismatch";
    case JournalErrc::truncated: return "truncated";
    case JournalErrc::malformed_record: return "malformed_record";
    case JournalErrc::out_of_order: return "out_of_order";
    case JournalErrc::closed: return "closed";
    case JournalErrc::io: return "io";
  }
  return "unknown";
}

JournalError::JournalError(JournalErrc code, std::string message, std::optional<std::size_t> record_index,
                           std::optional<std::uint64_t> byte_offset)
    : Error(std::string(journal_errc_name(code)) + ": " + message), code_(code), record_index_(record_index),
      byte_offset_(byte_offset) {}

const SessionMeta& SessionJournal::meta() const {
  if (records.empty() || !std::holds_alternative<SessionMeta>(records.front())) {
    throw JournalError(JournalErrc::malformed_record, "journal does not start with SessionMeta", 0);
  }
  return std::get<SessionMeta>(records.front());
}

std::optional<Micros> SessionJournal::declared_session_end() const {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (const auto* m = std::get_if<SessionMeta>(&*it); m && m->session_end) return m->session_end;
  }
  return std::nullopt;
}

void RecordOrderGuard::check(const Record& record, std::size_t record_index) const {
  RecordKind kind = kind_of(record);
  if (count_ == 0 && kind != RecordKind::session_meta) {
    throw JournalError(JournalErrc::malformed_record, "first record must be SessionMeta", record_index);
  }
  auto key = ordering_key(record);
  if (!key) return;
  auto it = last_key_.find(kind);
  if (it != last_key_.end() && *key < it->second) {
    throw JournalError(JournalErrc::out_of_order,
                       std::string(record_kind_name(kind)) + " key " + std::to_string(*key) +
                           " precedes previous " + std::to_string(it->second),
                       record_index);
  }
}

void RecordOrderGuard::accept(const Record& record) {
  check(record, count_);
  if (auto key = ordering_key(record)) last_key_[kind_of(record)] = *key;
  ++count_;
}

std::vector<std::uint8_t> encode_journal_header() {
  std::vector<std::uint8_t> out(kJournalMagic.begin(), kJournalMagic.end());
  bytes::put_le<std::uint16_t>(out, kJournalVersion);
  return out;
}

std::vector<std::uint8_t> encode_record(const Record& record) {
  std::string payload = canonical_payload(record);
  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + kRecordOverhead);
  out.push_back(static_cast<std::uint8_t>(kind_of(record)));
  bytes::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  bytes::put_le<std::uint32_t>(out, crc32(out));
  return out;
}

SessionJournal parse_journal(std::span<const std::uint8_t> data, const JournalReadOptions& options) {
  if (data.size() < kJournalMagic.size() || !std::equal(kJournalMagic.begin(), kJournalMagic.end(), data.begin())) {
    throw JournalError(JournalErrc::bad_magic, "missing AGSJ magic", std::nullopt, 0);
  }
  if (data.size() < kJournalHeaderSize) {
    throw JournalError(JournalErrc::truncated, "file ends inside the header", std::nullopt, data.size());
  }
  auto version = bytes::get_le<std::uint16_t>(data.subspan(4));
  if (version != kJournalVersion) {
    throw JournalError(JournalErrc::unsupported_version, "version " + std::to_string(version), std::nullopt, 4);
  }

  SessionJournal journal;
  RecordOrderGuard guard;
  std::size_t offset = kJournalHeaderSize;
  while (offset < data.size()) {
    std::size_t index = journal.records.size();
    std::size_t remaining = data.size() - offset;
    auto truncated = [&](std::string what) {
      if (options.tolerate_truncated_tail) return true;
      throw JournalError(JournalErrc::truncated, what + " at byte " + std::to_string(offset), index, offset);
    };
    if (remaining < kRecordOverhead) {
      if (truncated("partial record header")) break;
    }
    auto length = bytes::get_le<std::uint32_t>(data.subspan(offset + 1));
    if (remaining - kRecordOverhead < length) {
      if (truncated("record body overruns end of file")) break;
    }
    auto framed = data.subspan(offset, 5 + length);
    auto stored = bytes::get_le<std::uint32_t>(data.subspan(offset + 5 + length));
    if (crc32(framed) != stored) {
      throw JournalError(JournalErrc::crc_mismatch, "record " + std::to_string(index), index, offset);
    }
    auto kind = record_kind_from_code(framed[0]);
    if (!kind) {
      throw JournalError(JournalErrc::malformed_record, "unknown record kind " + std::to_string(framed[0]), index,
                         offset);
    }
    Record record;
    try {
      auto payload = framed.subspan(5);
      record = record_from_json(*kind, Json::parse(payload.begin(), payload.end()));
    } catch (const JournalError&) {
      throw;
    } catch (const std::exception& e) {
      throw JournalError(JournalErrc::malformed_record, e.what(), index, offset);
    }
    guard.check(record, index);
    guard.accept(record);
    journal.records.push_back(std::move(record));
    offset += kRecordOverhead + length;
  }
  return journal;
}

SessionJournal read_session(const std::filesystem::path& path, const JournalReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JournalError(JournalErrc::io, "cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_journal(data, options);
}

JournalWriter::JournalWriter(std::unique_ptr<std::FILE, FileCloser> file, std::uint64_t position,
                             RecordOrderGuard guard)
    : file_(std::move(file)), position_(position), guard_(std::move(guard)) {}

JournalWriter JournalWriter::create(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw JournalError(JournalErrc::io, "cannot create " + path.string());
  auto header = encode_journal_header();
  if (std::fwrite(header.data(), 1, header.size(), file.get()) != header.size() || std::fflush(file.get()) != 0) {
    throw JournalError(JournalErrc::io, "write failed on " + path.string());
  }
  return JournalWriter(std::move(file), header.size(), RecordOrderGuard{});
}

JournalWriter JournalWriter::open_append(const std::filesystem::path& path) {
  SessionJournal existing = read_session(path);
  RecordOrderGuard guard;
  for (const auto& r : existing.records) guard.accept(r);
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "ab"));
  if (!file) throw JournalError(JournalErrc::io, "cannot open " + path.string());
  auto size = std::filesystem::file_size(path);
  return JournalWriter(std::move(file), size, std::move(guard));
}

void JournalWriter::append(const Record& record) {
  if (!file_) throw JournalError(JournalErrc::closed, "append on a closed writer");
  guard_.check(record, guard_.count());
  auto framed = encode_record(record);
  if (std::fwrite(framed.data(), 1, framed.size(), file_.get()) != framed.size() || std::fflush(file_.get()) != 0) {
    throw JournalError(JournalErrc::io, "write failed", guard_.count(), position_);
  }
  guard_.accept(record);
  position_ += framed.size();
}

void JournalWriter::append_all(std::span<const Record> records) {
  if (!file_) throw JournalError(JournalErrc::closed, "append on a closed writer");
  RecordOrderGuard next = guard_;
  std::vector<std::uint8_t> framed;
  for (const auto& r : records) {
    next.check(r, next.count());
    next.accept(r);
    auto one = encode_record(r);
    framed.insert(framed.end(), one.begin(), one.end());
  }
  if (std::fwrite(framed.data(), 1, framed.size(), file_.get()) != framed.size() || std::fflush(file_.get()) != 0) {
    throw JournalError(JournalErrc::io, "write failed", guard_.count(), position_);
  }
  guard_ = std::move(next);
  position_ += framed.size();
}

void JournalWriter::close() { file_.reset(); }

std::vector<std::uint8_t> serialize_journal(const SessionJournal& journal) {
  RecordOrderGuard guard;
  auto out = encode_journal_header();
  for (const auto& r : journal.records) {
    guard.accept(r);
    auto framed = encode_record(r);
    out.insert(out.end(), framed.begin(), framed.end());
  }
  return out;
}

void write_session(const std::filesystem::path& path, const SessionJournal& journal) {
  auto data = serialize_journal(journal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw JournalError(JournalErrc::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw JournalError(JournalErrc::io, "write failed on " + path.string());
}

}  // namespace sia
