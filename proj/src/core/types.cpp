#include "sia/core/types.hpp"

#include <string>

namespace sia {

namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "neutral", "happiness", "sadness", "anger", "fear", "surprise", "disgust", "contempt"};

}  // namespace

std::string_view label_name(ExpressionLabel label) { return kLabelNames.at(label_index(label)); }

std::optional<ExpressionLabel> label_from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kLabelCount)) return std::nullopt;
  return static_cast<ExpressionLabel>(code);
}

ExpressionLabel label_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    if (kLabelNames[i] == name) return static_cast<ExpressionLabel>(i);
  }
  throw Error("unknown expression label '" + std::string(name) + "'");
}

std::string_view channel_name(CueChannel channel) {
  return channel == CueChannel::visual ? "visual" : "audio";
}

CueChannel channel_from_name(std::string_view name) {
  if (name == "visual") return CueChannel::visual;
  if (name == "audio") return CueChannel::audio;
  throw Error("unknown cue channel '" + std::string(name) + "'");
}

std::string_view suppress_reason_name(SuppressReason reason) {
  switch (reason) {
    case SuppressReason::cooldown: return "cooldown";
    case SuppressReason::rate_limit: return "rate_limit";
    case SuppressReason::neutral: return "neutral";
    case SuppressReason::policy_off: return "policy_off";
  }
  return "unknown";
}

SuppressReason suppress_reason_from_name(std::string_view name) {
  if (name == "cooldown") return SuppressReason::cooldown;
  if (name == "rate_limit") return SuppressReason::rate_limit;
  if (name == "neutral") return SuppressReason::neutral;
  if (name == "policy_off") return SuppressReason::policy_off;
  throw Error("unknown suppress reason '" + std::string(name) + "'");
}

}  // namespace sia
