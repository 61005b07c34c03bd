#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "foreshadow/dataset.hpp"
#include "test_support.hpp"

namespace fs = foreshadow;
using fs::DataErrorCode;

namespace {

DataErrorCode parse_error(const std::string& text) {
  try {
    fs::parse_dataset(text);
  } catch (const fs::DataError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return DataErrorCode::MalformedCsv;
}

}  // namespace

TEST(ParseDataset, SingleRow) {
  const auto ds = fs::parse_dataset("item,category,2018,2019\nCoca-Cola,Beverages,1.0,2.0\n");
  ASSERT_EQ(ds.item_count(), 1u);
  ASSERT_EQ(ds.period_count(), 2u);
  EXPECT_EQ(ds.items()[0].id, "Coca-Cola");
  EXPECT_EQ(ds.items()[0].category, "Beverages");
  EXPECT_EQ(ds.periods(), (std::vector<std::string>{"2018", "2019"}));
  EXPECT_EQ(ds.values(), (std::vector<std::vector<double>>{{1.0, 2.0}}));
}

TEST(ParseDataset, PreservesRowAndColumnOrder) {
  const auto ds = fs::parse_dataset("item,category,b,a,c\nz,k,1,2,3\ny,k,4,5,6\n");
  EXPECT_EQ(ds.item_ids(), (std::vector<std::string>{"z", "y"}));
  EXPECT_EQ(ds.periods(), (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(ds.value(1, 2), 6.0);
}

TEST(ParseDataset, Errors) {
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,-3,1\n"), DataErrorCode::NegativeValue);
  EXPECT_EQ(parse_error("item,category,2018,2019\niSpy,x,1,2\niSpy,y,3,4\n"),
            DataErrorCode::DuplicateItem);
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,1,abc\n"), DataErrorCode::NonNumericValue);
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,1,nan\n"), DataErrorCode::NonNumericValue);
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,1\n"), DataErrorCode::RaggedRow);
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,1,2,3\n"), DataErrorCode::RaggedRow);
  EXPECT_EQ(parse_error("item,category,2018\nA,x,1\n"), DataErrorCode::TooFewPeriods);
  EXPECT_EQ(parse_error("item,category,2018,2019\nA,x,1,\n"), DataErrorCode::MissingValue);
  EXPECT_EQ(parse_error("name,category,2018,2019\nA,x,1,2\n"), DataErrorCode::BadHeader);
  EXPECT_EQ(parse_error("item,category,2018,2019\n"), DataErrorCode::EmptyDataset);
  EXPECT_EQ(parse_error(""), DataErrorCode::BadHeader);
  EXPECT_EQ(parse_error("item,category,2018,2018\nA,x,1,2\n"), DataErrorCode::DuplicatePeriod);
  EXPECT_EQ(parse_error("item,category,2018,2019\n,x,1,2\n"), DataErrorCode::EmptyItemId);
  EXPECT_EQ(parse_error("item,category,2018,2019\n\"A,x,1,2\n"), DataErrorCode::MalformedCsv);
}

TEST(ParseDataset, ErrorPositionIsFileRowAndColumn) {
  try {
    fs::parse_dataset("item,category,2018,2019\nA,x,1,2\nB,x,3,-4\n");
    FAIL();
  } catch (const fs::DataError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 4u);
  }
}

TEST(ParseDataset, QuotedFieldsAndCrlf) {
  const auto ds = fs::parse_dataset(
      "\xEF\xBB\xBFitem,category,\"2018, Q1\",2019\r\n"
      "\"Ben & Jerry\"\"s\",\"Ice, cream\",1, 2 \r\n"
      "\"multi\nline\",,3,4\r\n");
  EXPECT_EQ(ds.periods()[0], "2018, Q1");
  EXPECT_EQ(ds.items()[0].id, "Ben & Jerry\"s");
  EXPECT_EQ(ds.items()[0].category, "Ice, cream");
  EXPECT_EQ(ds.items()[1].id, "multi\nline");
  EXPECT_EQ(ds.items()[1].category, "uncategorized");
  EXPECT_EQ(ds.value(0, 1), 2.0);
}

TEST(ParseDataset, SkipsBlankLines) {
  const auto ds = fs::parse_dataset("item,category,1,2\n\nA,x,1,2\n\n");
  EXPECT_EQ(ds.item_count(), 1u);
}

TEST(ParseDataset, FromStream) {
  std::istringstream in("item,category,1,2\nA,x,1,2\n");
  EXPECT_EQ(fs::parse_dataset(in).item_count(), 1u);
}

TEST(SerializeDataset, RoundTripsRandomDatasets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto ds = fs::testing::random_dataset(rng, 12, 8);
    // Labels that need quoting.
    auto items = ds.items();
    items[0].id += ", \"quoted\"";
    auto periods = ds.periods();
    periods[0] = " padded ";
    ds = fs::RankingDataset::make(items, periods, ds.values());

    const auto text = fs::serialize_dataset(ds);
    const auto back = fs::parse_dataset(text);
    ASSERT_EQ(back, ds) << text;
    ASSERT_EQ(fs::serialize_dataset(back), text);
  }
}

TEST(ParseDataset, NeverRagged) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cells(1, 6);
  int parsed = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::string text = "item,category,p1,p2,p3\n";
    const int rows = cells(rng);
    for (int r = 0; r < rows; ++r) {
      text += "i" + std::to_string(r) + ",c";
      const int n = cells(rng);
      for (int c = 0; c < n; ++c) text += "," + std::to_string(cells(rng));
      text += "\n";
    }
    try {
      const auto ds = fs::parse_dataset(text);
      ++parsed;
      for (const auto& row : ds.values()) ASSERT_EQ(row.size(), ds.period_count());
    } catch (const fs::DataError& e) {
      ASSERT_EQ(e.code(), DataErrorCode::RaggedRow);
    }
  }
  EXPECT_GT(parsed, 0);
}

TEST(EditCell, ChangesOnlyOneCell) {
  const auto ds = fs::parse_dataset("item,category,2018,2019\nCoca-Cola,B,1,2\nPepsi,B,3,4\n");
  const auto edited = fs::edit_cell(ds, "Coca-Cola", "2019", 5.0);
  EXPECT_EQ(edited.value(0, 1), 5.0);
  EXPECT_EQ(ds.value(0, 1), 2.0);  // original untouched
  int diffs = 0;
  for (std::size_t i = 0; i < ds.item_count(); ++i) {
    for (std::size_t p = 0; p < ds.period_count(); ++p) diffs += ds.value(i, p) != edited.value(i, p);
  }
  EXPECT_EQ(diffs, 1);
  EXPECT_EQ(edited.items(), ds.items());
  EXPECT_EQ(edited.periods(), ds.periods());
}

TEST(EditCell, SameValueIsIdentity) {
  const auto ds = fs::testing::small_dataset();
  EXPECT_EQ(fs::edit_cell(ds, "A", "2019", ds.value(0, 1)), ds);
}

TEST(EditCell, RevertRestoresOriginal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = fs::testing::random_dataset(rng, 6, 5);
    const auto& item = ds.items()[trial % ds.item_count()].id;
    const auto& period = ds.periods()[trial % ds.period_count()];
    const double old = ds.value(*ds.find_item(item), *ds.find_period(period));
    const auto there = fs::edit_cell(ds, item, period, old + 42.5);
    EXPECT_NE(there, ds);
    EXPECT_EQ(fs::edit_cell(there, item, period, old), ds);
  }
}

TEST(EditCell, Errors) {
  const auto ds = fs::testing::small_dataset();
  auto code = [&](auto&& f) {
    try {
      f();
    } catch (const fs::DataError& e) {
      return e.code();
    }
    return DataErrorCode::MalformedCsv;
  };
  EXPECT_EQ(code([&] { fs::edit_cell(ds, "Unknown", "2019", 1.0); }), DataErrorCode::UnknownItem);
  EXPECT_EQ(code([&] { fs::edit_cell(ds, "A", "1999", 1.0); }), DataErrorCode::UnknownPeriod);
  EXPECT_EQ(code([&] { fs::edit_cell(ds, "A", "2019", -1.0); }), DataErrorCode::NegativeValue);
}
