#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. None of these call into the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sia/affect/classifier.hpp"
#include "sia/core/types.hpp"
#include "sia/events/cue_policy.hpp"
#include "sia/events/segmenter.hpp"
#include "sia/vision/face_model.hpp"

namespace sia::oracle {

/// Run-based scan per label: find an entry frame, walk to the first frame at
/// or below exit, keep the run if some frame in it is min_duration past the entry.
inline std::vector<ExpressiveEvent> segment(std::span<const ClassScores> s, double enter, double exit_th,
                                            Micros min_duration) {
  std::vector<ExpressiveEvent> out;
  const std::size_t n = s.size();
  std::vector<std::size_t> argmax(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kLabelCount; ++k) {
      if (s[i].scores[k] > s[i].scores[best]) best = k;
    }
    argmax[i] = best;
  }
  for (std::size_t k = 1; k < kLabelCount; ++k) {
    std::size_t i = 0;
    while (i < n) {
      if (!(s[i].scores[k] >= enter && argmax[i] == k)) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < n && s[j].scores[k] > exit_th) ++j;
      // Frames i..j-1 form the run; j (if < n) terminates it.
      std::optional<Micros> confirmed;
      double peak = 0.0;
      for (std::size_t m = i; m < j; ++m) {
        peak = std::max(peak, s[m].scores[k]);
        if (!confirmed && s[m].timestamp - s[i].timestamp >= min_duration) confirmed = s[m].timestamp;
      }
      if (confirmed) {
        out.push_back({static_cast<ExpressionLabel>(k), s[i].timestamp, s[j - 1].timestamp, *confirmed, peak});
      }
      i = j + 1;
    }
  }
  std::sort(out.begin(), out.end(), [](const ExpressiveEvent& a, const ExpressiveEvent& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });
  return out;
}

/// Random score streams with long persistent stretches, so that every
/// automaton branch is exercised.
inline std::vector<ClassScores> random_score_stream(std::mt19937_64& rng, std::size_t frames) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, kLabelCount - 1);
  std::uniform_int_distribution<int> hold(1, 40);
  std::vector<ClassScores> out;
  Micros t = static_cast<Micros>(u(rng) * 1e6);
  int left = 0;
  std::size_t dom = 0;
  double level = 0.0;
  while (out.size() < frames) {
    if (left-- <= 0) {
      left = hold(rng);
      dom = static_cast<std::size_t>(label(rng));
      level = u(rng);
    }
    ScoreArray s;
    double rest = 0;
    for (auto& v : s) rest += (v = u(rng));
    const double top = std::clamp(level + 0.15 * (u(rng) - 0.5), 0.0, 1.0);
    for (auto& v : s) v = v / rest * (1.0 - top);
    s[dom] += top;
    // Some frames land exactly on a threshold-ish value to hit the boundaries.
    if (u(rng) < 0.02) s[dom] = 0.65;
    if (u(rng) < 0.02) s[dom] = 0.45;
    out.push_back({t, s});
    t += 20000 + static_cast<Micros>(u(rng) * 26667);
  }
  return out;
}

struct CueCheck {
  std::size_t cooldown_violations = 0;
  std::size_t rate_violations = 0;
  std::size_t unjustified_suppressions = 0;
};

/// Checks issued cues against the policy with a brute-force trailing window
/// and verifies every suppression reason against the issued history.
inline CueCheck check_cues(std::span<const ExpressiveEvent> events, std::span<const Cue> cues,
                           const events::CuePolicyConfig& cfg) {
  CueCheck r;
  std::vector<const Cue*> issued;
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const Cue& c = cues[i];
    const Micros at = c.issued_at;
    auto count_window = [&] {
      std::size_t n = 0;
      for (const Cue* p : issued) n += p->issued_at > at - events::kRateWindow && p->issued_at <= at;
      return n;
    };
    auto last_same = [&]() -> std::optional<Micros> {
      std::optional<Micros> last;
      for (const Cue* p : issued) {
        if (p->label == c.label) last = p->issued_at;
      }
      return last;
    };
    if (!c.suppressed()) {
      if (auto last = last_same(); last && at - *last < cfg.per_label_cooldown) ++r.cooldown_violations;
      if (count_window() + 1 > static_cast<std::size_t>(cfg.global_rate_limit)) ++r.rate_violations;
      if (!cfg.enabled(c.label)) ++r.unjustified_suppressions;
      issued.push_back(&c);
      continue;
    }
    switch (*c.suppress_reason) {
      case SuppressReason::neutral: r.unjustified_suppressions += c.label != ExpressionLabel::neutral; break;
      case SuppressReason::policy_off: r.unjustified_suppressions += cfg.enabled(c.label); break;
      case SuppressReason::cooldown: {
        auto last = last_same();
        r.unjustified_suppressions += !(last && at - *last < cfg.per_label_cooldown);
        break;
      }
      case SuppressReason::rate_limit:
        r.unjustified_suppressions += count_window() < static_cast<std::size_t>(cfg.global_rate_limit);
        break;
    }
    (void)events;
  }
  return r;
}

/// Random event schedule sorted by start, confirmed min_duration after start.
inline std::vector<ExpressiveEvent> random_schedule(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<Micros> gap(0, 8 * kMicrosPerSecond);
  std::uniform_int_distribution<int> label(1, kLabelCount - 1);
  std::vector<ExpressiveEvent> out;
  Micros t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += gap(rng);
    const Micros confirmed = t + 500 * kMicrosPerMilli;
    out.push_back({static_cast<ExpressionLabel>(label(rng)), t, confirmed + 200000, confirmed, 0.8});
  }
  return out;
}

/// Integer-millisecond span set for grid comparisons.
struct MsSpan {
  std::int64_t start_ms;
  std::int64_t end_ms;
};

inline std::vector<MsSpan> random_ms_spans(std::mt19937_64& rng, std::int64_t horizon_ms, int count) {
  std::uniform_int_distribution<std::int64_t> pos(0, horizon_ms);
  std::vector<MsSpan> out;
  for (int i = 0; i < count; ++i) {
    std::int64_t a = pos(rng), b = pos(rng);
    if (a > b) std::swap(a, b);
    out.push_back({a, b});
  }
  return out;
}

/// Marks each 1 ms cell [t, t+1) covered by any span.
inline std::vector<char> grid(std::span<const MsSpan> spans, std::int64_t horizon_ms) {
  std::vector<char> g(static_cast<std::size_t>(horizon_ms), 0);
  for (const auto& s : spans) {
    for (std::int64_t t = std::max<std::int64_t>(0, s.start_ms); t < std::min(s.end_ms, horizon_ms); ++t) {
      g[static_cast<std::size_t>(t)] = 1;
    }
  }
  return g;
}

inline double grid_fraction(const std::vector<char>& cover, std::int64_t horizon_ms) {
  std::int64_t n = 0;
  for (char c : cover) n += c;
  return static_cast<double>(n) / static_cast<double>(horizon_ms);
}

/// Covered cells of `a` inside `b` over cells of `b`; empty when `b` has none.
inline std::optional<double> grid_ratio(const std::vector<char>& a, const std::vector<char>& b) {
  std::int64_t both = 0, base = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    base += b[i];
    both += b[i] && a[i];
  }
  if (base == 0) return std::nullopt;
  return static_cast<double>(both) / static_cast<double>(base);
}

// Straight-from-the-definition objective used as the finite-difference oracle.
inline double oracle_objective(const affect::ClassifierModel& m, const affect::LabeledDataset& d, double lambda) {
  double total = 0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    const auto f = d.features(n);
    std::array<double, kLabelCount> z{};
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      z[k] = m.bias[k];
      for (std::size_t j = 0; j < m.feature_length; ++j) z[k] += m.weight(k, j) * f[j];
    }
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double lse = 0;
    for (double v : z) lse += std::exp(v - mx);
    total += mx + std::log(lse) - z[label_index(d.label(n))];
  }
  double reg = 0;
  for (double w : m.weights) reg += w * w;
  return total / static_cast<double>(d.size()) + 0.5 * lambda * reg;
}

struct Instance {
  affect::ClassifierModel model;
  affect::LabeledDataset data;
  double lambda;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t features, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, kLabelCount - 1);
  Instance inst{affect::ClassifierModel::zeros(features), affect::LabeledDataset(features), std::uniform_real_distribution<double>(0, 0.1)(rng)};
  for (auto& w : inst.model.weights) w = 0.5 * g(rng);
  for (auto& b : inst.model.bias) b = 0.5 * g(rng);
  std::vector<double> f(features);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : f) v = g(rng);
    inst.data.add(f, kAllLabels[lab(rng)]);
  }
  return inst;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

inline constexpr double kDeg = std::numbers::pi / 180.0;

// Independent of the library's rotation helper: plain products of the three axis rotations.
using M3 = std::array<std::array<double, 3>, 3>;

inline M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline M3 oracle_rotation(double yaw, double pitch, double roll) {
  const double y = yaw * kDeg, p = pitch * kDeg, r = roll * kDeg;
  const M3 ry{{{std::cos(y), 0, std::sin(y)}, {0, 1, 0}, {-std::sin(y), 0, std::cos(y)}}};
  const M3 rx{{{1, 0, 0}, {0, std::cos(p), -std::sin(p)}, {0, std::sin(p), std::cos(p)}}};
  const M3 rz{{{std::cos(r), -std::sin(r), 0}, {std::sin(r), std::cos(r), 0}, {0, 0, 1}}};
  return mul(rz, mul(rx, ry));
}

inline LandmarkFrame project(const vision::ReferenceFaceModel& model, const M3& r, double scale, Point2 shift) {
  LandmarkFrame f;
  f.face_present = true;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& p = model.points[i];
    const double x = r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z;
    const double y = r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z;
    f.points[i] = {shift.x + scale * x, shift.y - scale * y};
  }
  return f;
}

}  // namespace sia::oracle
