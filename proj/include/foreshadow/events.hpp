#pragma once

// Ranking-change detection between consecutive periods, used to suggest
// foreshadowing targets.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "foreshadow/dataset.hpp"
#include "foreshadow/effects.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

// Declaration order is the sort order of event kinds.
enum class EventKind { Overtake, NewLeader, EntersTopN, ExitsTopN, RankJump };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Overtake: return "overtake";
    case EventKind::NewLeader: return "new_leader";
    case EventKind::EntersTopN: return "enters_top_n";
    case EventKind::ExitsTopN: return "exits_top_n";
    case EventKind::RankJump: return "rank_jump";
  }
  return "unknown";
}

struct KeyEvent {
  EventKind kind = EventKind::RankJump;
  std::string item_id;
  std::size_t period_index = 1;  // compares period_index - 1 to period_index
  int magnitude = 0;             // |rank change| of item_id
  std::string other_item_id;     // overtaken item; empty for other kinds

  friend bool operator==(const KeyEvent&, const KeyEvent&) = default;
};

inline bool event_order(const KeyEvent& a, const KeyEvent& b) {
  return std::tie(a.period_index, a.kind, a.item_id, a.other_item_id) <
         std::tie(b.period_index, b.kind, b.item_id, b.other_item_id);
}

inline constexpr int kDefaultJumpThreshold = 3;
inline constexpr double kDefaultLeadPeriods = 1.0;

/// Emits, for every consecutive period pair:
///  - new_leader for an item reaching rank 1 it did not hold before;
///  - overtake for each ordered pair that swaps order and ends with both
///    items inside the top N, attributed to the item that moved ahead;
///  - enters_top_n / exits_top_n when an item crosses the top-N boundary;
///  - rank_jump when |rank change| >= jump_threshold.
inline std::vector<KeyEvent> detect_events(const RankingDataset& ds, int top_n,
                                           int jump_threshold) {
  std::vector<KeyEvent> events;
  const auto ids = ds.item_ids();
  const std::size_t n = ids.size();
  auto before = compute_ranks(ds.column(0), ids);
  for (std::size_t p = 1; p < ds.period_count(); ++p) {
    const auto after = compute_ranks(ds.column(p), ids);
    for (std::size_t i = 0; i < n; ++i) {
      const int delta = std::abs(after[i] - before[i]);
      if (after[i] == 1 && before[i] != 1) {
        events.push_back({EventKind::NewLeader, ids[i], p, delta, {}});
      }
      if (before[i] > top_n && after[i] <= top_n) {
        events.push_back({EventKind::EntersTopN, ids[i], p, delta, {}});
      }
      if (before[i] <= top_n && after[i] > top_n) {
        events.push_back({EventKind::ExitsTopN, ids[i], p, delta, {}});
      }
      if (delta >= jump_threshold) {
        events.push_back({EventKind::RankJump, ids[i], p, delta, {}});
      }
      if (after[i] > top_n) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (before[j] < before[i] && after[j] > after[i] && after[j] <= top_n) {
          events.push_back({EventKind::Overtake, ids[i], p, delta, ids[j]});
        }
      }
    }
    before = after;
  }
  std::sort(events.begin(), events.end(), event_order);
  return events;
}

/// Contour draft that ends exactly at the event and starts up to
/// `lead_periods` earlier, clamped at period 0.
inline ForeshadowSpec suggest_foreshadow(const KeyEvent& event, double lead_periods) {
  ForeshadowSpec spec;
  spec.id = "suggest-" + std::string(to_string(event.kind)) + "-" + event.item_id + "-" +
            std::to_string(event.period_index);
  if (!event.other_item_id.empty()) spec.id += "-" + event.other_item_id;
  spec.effects = {Contour{}};
  spec.target_items = {event.item_id};
  spec.target_period = static_cast<double>(event.period_index);
  spec.timing = std::max(0.0, spec.target_period - lead_periods);
  spec.duration = spec.target_period - spec.timing;
  return spec;
}

}  // namespace foreshadow
