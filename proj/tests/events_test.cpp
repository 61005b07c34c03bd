#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "foreshadow/events.hpp"
#include "test_support.hpp"

namespace fs = foreshadow;
using fs::EventKind;

namespace {

std::size_t count_kind(const std::vector<fs::KeyEvent>& es, EventKind k) {
  return static_cast<std::size_t>(
      std::count_if(es.begin(), es.end(), [&](const auto& e) { return e.kind == k; }));
}

}  // namespace

TEST(DetectEvents, NewLeaderFromThirdPlace) {
  const auto ds = fs::parse_dataset("item,category,p0,p1\nA,c,10,5\nB,c,8,4\nC,c,6,12\n");
  const auto es = fs::detect_events(ds, 10, 2);
  const auto leader = std::find_if(es.begin(), es.end(),
                                   [](const auto& e) { return e.kind == EventKind::NewLeader; });
  ASSERT_NE(leader, es.end());
  EXPECT_EQ(leader->item_id, "C");
  EXPECT_EQ(leader->period_index, 1u);
  EXPECT_EQ(leader->magnitude, 2);
  EXPECT_EQ(count_kind(es, EventKind::RankJump), 1u);
  EXPECT_EQ(count_kind(es, EventKind::Overtake), 2u);  // C passes A and B
  EXPECT_EQ(count_kind(fs::detect_events(ds, 10, 3), EventKind::RankJump), 0u);
}

TEST(DetectEvents, ConstantRanksGiveNothing) {
  const auto ds = fs::parse_dataset("item,category,a,b,c\nA,c,10,11,12\nB,c,5,6,7\nC,c,1,1,1\n");
  EXPECT_TRUE(fs::detect_events(ds, 2, 1).empty());
}

TEST(DetectEvents, TopNBoundary) {
  const auto ds = fs::parse_dataset("item,category,a,b\nA,c,3,1\nB,c,2,2\nC,c,1,3\n");
  const auto es = fs::detect_events(ds, 2, 99);
  // C: 3 -> 1 enters; A: 1 -> 3 exits; B stays at 2.
  EXPECT_EQ(count_kind(es, EventKind::EntersTopN), 1u);
  EXPECT_EQ(count_kind(es, EventKind::ExitsTopN), 1u);
  // Only C over B ends with both inside the top 2.
  ASSERT_EQ(count_kind(es, EventKind::Overtake), 1u);
  const auto ov = *std::find_if(es.begin(), es.end(),
                                [](const auto& e) { return e.kind == EventKind::Overtake; });
  EXPECT_EQ(ov.item_id, "C");
  EXPECT_EQ(ov.other_item_id, "B");
}

TEST(DetectEvents, SortedAndNeverAtPeriodZero) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = fs::testing::random_dataset(rng, 8, 5);
    const auto es = fs::detect_events(ds, 3, 2);
    EXPECT_TRUE(std::is_sorted(es.begin(), es.end(), fs::event_order));
    for (const auto& e : es) {
      EXPECT_GE(e.period_index, 1u);
      if (e.kind == EventKind::RankJump) EXPECT_GE(e.magnitude, 1);
    }
  }
}

TEST(DetectEvents, MatchesBruteForceOracle) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = fs::testing::random_dataset(rng, 8, 5, 8);
    const int top_n = 1 + trial % 8;
    const int jump = 1 + trial % 4;
    ASSERT_EQ(fs::detect_events(ds, top_n, jump), fs::testing::oracle_events(ds, top_n, jump))
        << fs::serialize_dataset(ds);
  }
}

TEST(DetectEvents, InvariantUnderRowPermutation) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = fs::testing::random_dataset(rng, 9, 5, 2);
    std::vector<std::size_t> order(ds.item_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<fs::ItemRecord> items;
    std::vector<std::vector<double>> values;
    for (auto i : order) {
      items.push_back(ds.items()[i]);
      values.push_back(ds.values()[i]);
    }
    const auto permuted = fs::RankingDataset::make(items, ds.periods(), values);
    EXPECT_EQ(fs::detect_events(ds, 4, 2), fs::detect_events(permuted, 4, 2));
  }
}

TEST(SuggestForeshadow, LeadArithmetic) {
  const fs::KeyEvent e{EventKind::NewLeader, "A", 3, 2, {}};
  const auto s = fs::suggest_foreshadow(e, 1.5);
  EXPECT_EQ(s.timing, 1.5);
  EXPECT_EQ(s.duration, 1.5);
  EXPECT_EQ(s.target_period, 3.0);
  ASSERT_EQ(s.effects.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<fs::Contour>(s.effects[0]));
  EXPECT_EQ(s.target_items, std::vector<std::string>{"A"});
}

TEST(SuggestForeshadow, ClampsAtZero) {
  const auto s = fs::suggest_foreshadow({EventKind::RankJump, "A", 1, 4, {}}, 5.0);
  EXPECT_EQ(s.timing, 0.0);
  EXPECT_EQ(s.duration, 1.0);
}

TEST(SuggestForeshadow, DraftsAlwaysValidate) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> lead(0.01, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ds = fs::testing::random_dataset(rng, 8, 6, 2);
    for (const auto& e : fs::detect_events(ds, 3, 1)) {
      const auto draft = fs::suggest_foreshadow(e, lead(rng));
      ASSERT_TRUE(fs::validate_spec(draft, ds).empty()) << draft.id;
    }
  }
}
