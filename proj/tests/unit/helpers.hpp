#pragma once

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sia/affect/classifier.hpp"
#include "sia/config.hpp"

namespace sia::test {

inline std::vector<std::uint8_t> from_hex(const std::string& hex) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sia-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// The default classifier, trained once per test binary.
inline const affect::ClassifierModel& default_model() {
  static const affect::ClassifierModel model = default_classifier(AffectConfig{});
  return model;
}

inline ClassScores scores_at(Micros t, const ScoreArray& s) { return ClassScores{t, s}; }

/// A score vector with `top` at `value` and the rest sharing the remainder.
inline ScoreArray peaked(ExpressionLabel top, double value) {
  ScoreArray s;
  s.fill((1.0 - value) / (kLabelCount - 1));
  s[label_index(top)] = value;
  return s;
}

}  // namespace sia::test
