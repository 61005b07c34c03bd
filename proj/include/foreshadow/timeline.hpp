#pragma once

// Compiles a ranking dataset into per-frame bar geometry for a bar chart race.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foreshadow/dataset.hpp"

namespace foreshadow {

enum class Easing { Linear, CubicInOut };

inline std::string_view to_string(Easing e) {
  return e == Easing::Linear ? "linear" : "cubic_in_out";
}

enum class TimelineErrorCode { TooFewPeriods, InvalidSettings, OutOfRange };

inline std::string_view to_string(TimelineErrorCode code) {
  switch (code) {
    case TimelineErrorCode::TooFewPeriods: return "TooFewPeriods";
    case TimelineErrorCode::InvalidSettings: return "InvalidSettings";
    case TimelineErrorCode::OutOfRange: return "OutOfRange";
  }
  return "Unknown";
}

class TimelineError : public std::runtime_error {
 public:
  TimelineError(TimelineErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  TimelineErrorCode code() const noexcept { return code_; }

 private:
  TimelineErrorCode code_;
};

struct AnimationSettings {
  double seconds_per_period = 2.0;
  int fps = 30;
  int top_n = 10;
  Easing easing = Easing::Linear;

  friend bool operator==(const AnimationSettings&, const AnimationSettings&) = default;
};

/// Throws InvalidSettings unless every period spans at least one frame.
inline void check_settings(const AnimationSettings& s) {
  if (!(s.seconds_per_period > 0.0) || !std::isfinite(s.seconds_per_period)) {
    throw TimelineError(TimelineErrorCode::InvalidSettings,
                        "seconds_per_period must be positive");
  }
  if (s.fps < 1) {
    throw TimelineError(TimelineErrorCode::InvalidSettings, "fps must be >= 1");
  }
  if (s.top_n < 1) {
    throw TimelineError(TimelineErrorCode::InvalidSettings, "top_n must be >= 1");
  }
  if (s.seconds_per_period * s.fps < 1.0) {
    throw TimelineError(TimelineErrorCode::InvalidSettings,
                        "seconds_per_period * fps must be >= 1 frame per period");
  }
}

inline double ease(Easing e, double u) {
  switch (e) {
    case Easing::Linear:
      return u;
    case Easing::CubicInOut:
      if (u < 0.5) return 4.0 * u * u * u;
      {
        const double t = -2.0 * u + 2.0;
        return 1.0 - t * t * t / 2.0;
      }
  }
  return u;
}

/// Ranks by descending value; equal values are ordered by ascending id.
/// Returns a permutation of 1..n aligned with `values`.
inline std::vector<int> compute_ranks(const std::vector<double>& values,
                                      const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  });
  std::vector<int> ranks(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    ranks[order[pos]] = static_cast<int>(pos) + 1;
  }
  return ranks;
}

inline std::size_t frame_count_for(std::size_t period_count, const AnimationSettings& s) {
  const double span = static_cast<double>(period_count - 1) * s.seconds_per_period * s.fps;
  // Absorb representation error such as 0.7 * 10 = 7.000000000000001.
  const double frames = std::ceil(span - 1e-9 * std::max(1.0, span));
  return static_cast<std::size_t>(frames) + 1;
}

inline double period_to_time(double period_index, const AnimationSettings& s,
                             std::size_t period_count) {
  const double last = static_cast<double>(period_count) - 1.0;
  if (!(period_index >= 0.0) || period_index > last) {
    throw TimelineError(TimelineErrorCode::OutOfRange,
                        "period index " + format_number(period_index) +
                            " outside [0, " + format_number(last) + "]");
  }
  return period_index * s.seconds_per_period;
}

struct ItemFrame {
  double value = 0.0;
  int rank = 0;                // rank at the nearest period
  double slot_position = 0.0;  // 1-based, continuous
  bool visible = false;        // slot_position <= top_n + 1

  friend bool operator==(const ItemFrame&, const ItemFrame&) = default;
};

struct FrameState {
  std::size_t index = 0;
  double time_s = 0.0;
  double period_position = 0.0;  // continuous period coordinate
  std::size_t nearest_period = 0;
  std::vector<ItemFrame> items;  // dataset item order

  friend bool operator==(const FrameState&, const FrameState&) = default;
};

/// Largest value among visible bars; the width normalization denominator.
inline double visible_max_value(const FrameState& frame) {
  double m = 0.0;
  for (const auto& it : frame.items) {
    if (it.visible) m = std::max(m, it.value);
  }
  return m;
}

struct KeyframeTimeline {
  std::vector<FrameState> frames;
  AnimationSettings settings;
  std::vector<std::size_t> period_boundaries;  // frame index per period
  std::vector<ItemRecord> items;
  std::vector<std::string> periods;
  std::vector<std::vector<int>> period_ranks;  // [period][item]

  std::size_t frame_count() const noexcept { return frames.size(); }
  std::size_t period_count() const noexcept { return periods.size(); }
  double duration_s() const {
    return static_cast<double>(periods.size() - 1) * settings.seconds_per_period;
  }

  std::vector<std::string> item_ids() const {
    std::vector<std::string> out;
    for (const auto& it : items) out.push_back(it.id);
    return out;
  }

  /// Frame nearest a (possibly fractional) period coordinate. Integer
  /// periods map to their boundary frame.
  std::size_t frame_index_for_period(double period) const {
    const double last = static_cast<double>(periods.size()) - 1.0;
    if (!(period >= 0.0) || period > last) {
      throw TimelineError(TimelineErrorCode::OutOfRange,
                          "period " + format_number(period) + " outside timeline");
    }
    auto seg = static_cast<std::size_t>(std::floor(period));
    if (seg + 1 >= periods.size()) return period_boundaries.back();
    const double u = period - static_cast<double>(seg);
    const auto span = static_cast<double>(period_boundaries[seg + 1] - period_boundaries[seg]);
    return period_boundaries[seg] + static_cast<std::size_t>(std::llround(u * span));
  }

  friend bool operator==(const KeyframeTimeline&, const KeyframeTimeline&) = default;
};

namespace detail {

inline std::vector<std::size_t> boundaries_for(std::size_t period_count,
                                               std::size_t frame_count,
                                               const AnimationSettings& s) {
  std::vector<std::size_t> b(period_count);
  for (std::size_t p = 0; p + 1 < period_count; ++p) {
    b[p] = static_cast<std::size_t>(
        std::llround(static_cast<double>(p) * s.seconds_per_period * s.fps));
  }
  b.back() = frame_count - 1;
  return b;
}

}  // namespace detail

/// State of frame `k`; depends only on (dataset, settings, k) through the
/// precomputed boundaries and per-period ranks.
inline FrameState compute_frame(const RankingDataset& ds, const AnimationSettings& s,
                                const std::vector<std::size_t>& boundaries,
                                const std::vector<std::vector<int>>& ranks,
                                std::size_t k) {
  FrameState f;
  f.index = k;
  f.items.resize(ds.item_count());
  const double visible_limit = static_cast<double>(s.top_n) + 1.0;

  const auto hit = std::lower_bound(boundaries.begin(), boundaries.end(), k);
  if (hit != boundaries.end() && *hit == k) {
    const auto p = static_cast<std::size_t>(hit - boundaries.begin());
    f.period_position = static_cast<double>(p);
    f.time_s = static_cast<double>(p) * s.seconds_per_period;
    f.nearest_period = p;
    for (std::size_t i = 0; i < ds.item_count(); ++i) {
      auto& it = f.items[i];
      it.value = ds.value(i, p);
      it.rank = ranks[p][i];
      it.slot_position = static_cast<double>(it.rank);
      it.visible = it.slot_position <= visible_limit;
    }
    return f;
  }

  const auto seg = static_cast<std::size_t>(hit - boundaries.begin()) - 1;
  const double u = static_cast<double>(k - boundaries[seg]) /
                   static_cast<double>(boundaries[seg + 1] - boundaries[seg]);
  const double e = ease(s.easing, u);
  f.period_position = static_cast<double>(seg) + u;
  f.time_s = f.period_position * s.seconds_per_period;
  f.nearest_period = u < 0.5 ? seg : seg + 1;
  for (std::size_t i = 0; i < ds.item_count(); ++i) {
    auto& it = f.items[i];
    it.value = std::lerp(ds.value(i, seg), ds.value(i, seg + 1), e);
    it.rank = ranks[f.nearest_period][i];
    it.slot_position = std::lerp(static_cast<double>(ranks[seg][i]),
                                 static_cast<double>(ranks[seg + 1][i]), e);
    it.visible = it.slot_position <= visible_limit;
  }
  return f;
}

inline KeyframeTimeline compile_timeline(const RankingDataset& ds,
                                         const AnimationSettings& settings) {
  if (ds.period_count() < 2) {
    throw TimelineError(TimelineErrorCode::TooFewPeriods,
                        "at least two periods are required");
  }
  check_settings(settings);

  KeyframeTimeline tl;
  tl.settings = settings;
  tl.items = ds.items();
  tl.periods = ds.periods();
  const auto ids = ds.item_ids();
  for (std::size_t p = 0; p < ds.period_count(); ++p) {
    tl.period_ranks.push_back(compute_ranks(ds.column(p), ids));
  }
  const std::size_t n = frame_count_for(ds.period_count(), settings);
  tl.period_boundaries = detail::boundaries_for(ds.period_count(), n, settings);
  tl.frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    tl.frames.push_back(compute_frame(ds, settings, tl.period_boundaries, tl.period_ranks, k));
  }
  return tl;
}

}  // namespace foreshadow
