#pragma once

// Temporal ranking data: one row per ranked item, one column per period.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

namespace foreshadow {

inline constexpr std::string_view kDefaultCategory = "uncategorized";

enum class DataErrorCode {
  BadHeader,
  EmptyDataset,
  DuplicateItem,
  DuplicatePeriod,
  EmptyItemId,
  NonNumericValue,
  MissingValue,
  NegativeValue,
  RaggedRow,
  TooFewPeriods,
  UnknownItem,
  UnknownPeriod,
  MalformedCsv,
};

inline std::string_view to_string(DataErrorCode code) {
  switch (code) {
    case DataErrorCode::BadHeader: return "BadHeader";
    case DataErrorCode::EmptyDataset: return "EmptyDataset";
    case DataErrorCode::DuplicateItem: return "DuplicateItem";
    case DataErrorCode::DuplicatePeriod: return "DuplicatePeriod";
    case DataErrorCode::EmptyItemId: return "EmptyItemId";
    case DataErrorCode::NonNumericValue: return "NonNumericValue";
    case DataErrorCode::MissingValue: return "MissingValue";
    case DataErrorCode::NegativeValue: return "NegativeValue";
    case DataErrorCode::RaggedRow: return "RaggedRow";
    case DataErrorCode::TooFewPeriods: return "TooFewPeriods";
    case DataErrorCode::UnknownItem: return "UnknownItem";
    case DataErrorCode::UnknownPeriod: return "UnknownPeriod";
    case DataErrorCode::MalformedCsv: return "MalformedCsv";
  }
  return "Unknown";
}

/// Raised by dataset ingestion and editing. `row` and `column` are 1-based
/// positions in the CSV file (header is row 1) when they apply, 0 otherwise.
class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, std::string message, std::size_t row = 0,
            std::size_t column = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        row_(row),
        column_(column) {}

  DataErrorCode code() const noexcept { return code_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  DataErrorCode code_;
  std::size_t row_;
  std::size_t column_;
};

struct ItemRecord {
  std::string id;
  std::string category{kDefaultCategory};

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

/// Rectangular items x periods matrix of non-negative metric values.
///
/// Instances are only produced through `make` / `parse_dataset`, so every
/// live value satisfies the invariants: unique non-empty item ids, unique
/// period labels, one finite value >= 0 per (item, period).
class RankingDataset {
 public:
  RankingDataset() = default;

  static RankingDataset make(std::vector<ItemRecord> items,
                             std::vector<std::string> periods,
                             std::vector<std::vector<double>> values) {
    if (periods.size() < 2) {
      throw DataError(DataErrorCode::TooFewPeriods,
                      "at least two periods are required");
    }
    if (items.empty()) {
      throw DataError(DataErrorCode::EmptyDataset, "no items");
    }
    if (values.size() != items.size()) {
      throw DataError(DataErrorCode::RaggedRow,
                      "value rows do not match item count");
    }
    std::unordered_set<std::string> seen_periods;
    for (std::size_t p = 0; p < periods.size(); ++p) {
      if (!seen_periods.insert(periods[p]).second) {
        throw DataError(DataErrorCode::DuplicatePeriod,
                        "duplicate period '" + periods[p] + "'", 1, p + 3);
      }
    }
    std::unordered_set<std::string> seen_items;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].id.empty()) {
        throw DataError(DataErrorCode::EmptyItemId, "empty item id", i + 2, 1);
      }
      if (items[i].category.empty()) items[i].category = kDefaultCategory;
      if (!seen_items.insert(items[i].id).second) {
        throw DataError(DataErrorCode::DuplicateItem,
                        "duplicate item '" + items[i].id + "'", i + 2, 1);
      }
      if (values[i].size() != periods.size()) {
        throw DataError(DataErrorCode::RaggedRow,
                        "row for '" + items[i].id + "' has " +
                            std::to_string(values[i].size()) + " values, expected " +
                            std::to_string(periods.size()),
                        i + 2);
      }
      for (std::size_t p = 0; p < periods.size(); ++p) {
        const double v = values[i][p];
        if (!std::isfinite(v)) {
          throw DataError(DataErrorCode::NonNumericValue, "non-finite value",
                          i + 2, p + 3);
        }
        if (v < 0.0) {
          throw DataError(DataErrorCode::NegativeValue,
                          "negative value for '" + items[i].id + "'", i + 2,
                          p + 3);
        }
      }
    }
    RankingDataset ds;
    ds.items_ = std::move(items);
    ds.periods_ = std::move(periods);
    ds.values_ = std::move(values);
    return ds;
  }

  const std::vector<ItemRecord>& items() const noexcept { return items_; }
  const std::vector<std::string>& periods() const noexcept { return periods_; }
  const std::vector<std::vector<double>>& values() const noexcept { return values_; }

  std::size_t item_count() const noexcept { return items_.size(); }
  std::size_t period_count() const noexcept { return periods_.size(); }

  double value(std::size_t item, std::size_t period) const {
    return values_.at(item).at(period);
  }

  /// Values of every item in one period, in item order.
  std::vector<double> column(std::size_t period) const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& row : values_) out.push_back(row.at(period));
    return out;
  }

  std::vector<std::string> item_ids() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& it : items_) out.push_back(it.id);
    return out;
  }

  std::optional<std::size_t> find_item(std::string_view id) const {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].id == id) return i;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> find_period(std::string_view label) const {
    for (std::size_t p = 0; p < periods_.size(); ++p) {
      if (periods_[p] == label) return p;
    }
    return std::nullopt;
  }

  /// Categories in first-appearance order.
  std::vector<std::string> categories() const {
    std::vector<std::string> out;
    for (const auto& it : items_) {
      if (std::find(out.begin(), out.end(), it.category) == out.end()) {
        out.push_back(it.category);
      }
    }
    return out;
  }

  friend bool operator==(const RankingDataset&, const RankingDataset&) = default;

 private:
  std::vector<ItemRecord> items_;
  std::vector<std::string> periods_;
  std::vector<std::vector<double>> values_;
};

namespace csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC 4180 record splitter. Accepts LF or CRLF line endings, strips a
/// leading UTF-8 byte order mark and skips blank lines.
inline std::vector<Record> read_records(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(current));
    current = Record{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw DataError(DataErrorCode::MalformedCsv,
                          "unexpected quote inside unquoted field", line,
                          current.fields.size() + 1);
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        record_has_content = true;
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        if (field_was_quoted) {
          throw DataError(DataErrorCode::MalformedCsv,
                          "text after closing quote", line,
                          current.fields.size() + 1);
        }
        field.push_back(c);
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) {
    throw DataError(DataErrorCode::MalformedCsv, "unterminated quoted field",
                    line, current.fields.size() + 1);
  }
  end_record();
  return records;
}

inline bool needs_quoting(std::string_view s) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline std::string quote(std::string_view s) {
  if (!needs_quoting(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace csv

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Parses the `item,category,<period>...` layout.
inline RankingDataset parse_dataset(std::string_view text) {
  const auto records = csv::read_records(text);
  if (records.empty()) {
    throw DataError(DataErrorCode::BadHeader, "missing header row", 1);
  }
  const auto& header = records.front().fields;
  auto header_is = [&](std::size_t idx, std::string_view name) {
    if (idx >= header.size()) return false;
    auto cell = csv::trim(header[idx]);
    return std::equal(cell.begin(), cell.end(), name.begin(), name.end(),
                      [](char a, char b) {
                        return std::tolower(static_cast<unsigned char>(a)) == b;
                      });
  };
  if (!header_is(0, "item") || !header_is(1, "category")) {
    throw DataError(DataErrorCode::BadHeader,
                    "header must start with 'item,category'", records.front().line);
  }
  if (header.size() < 4) {
    throw DataError(DataErrorCode::TooFewPeriods,
                    "at least two period columns are required",
                    records.front().line);
  }
  std::vector<std::string> periods(header.begin() + 2, header.end());

  if (records.size() < 2) {
    throw DataError(DataErrorCode::EmptyDataset, "no data rows");
  }

  std::vector<ItemRecord> items;
  std::vector<std::vector<double>> values;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw DataError(DataErrorCode::RaggedRow,
                      "expected " + std::to_string(header.size()) +
                          " fields, found " + std::to_string(rec.fields.size()),
                      rec.line);
    }
    ItemRecord item;
    item.id = rec.fields[0];
    if (csv::trim(item.id).empty()) {
      throw DataError(DataErrorCode::EmptyItemId, "empty item id", rec.line, 1);
    }
    if (!seen.insert(item.id).second) {
      throw DataError(DataErrorCode::DuplicateItem,
                      "duplicate item '" + item.id + "'", rec.line, 1);
    }
    item.category = rec.fields[1].empty() ? std::string(kDefaultCategory)
                                          : rec.fields[1];

    std::vector<double> row;
    row.reserve(periods.size());
    for (std::size_t c = 2; c < rec.fields.size(); ++c) {
      const auto cell = csv::trim(rec.fields[c]);
      if (cell.empty()) {
        throw DataError(DataErrorCode::MissingValue, "empty cell", rec.line, c + 1);
      }
      double v = 0.0;
      const char* first = cell.data();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(DataErrorCode::NonNumericValue,
                        "'" + std::string(cell) + "' is not a number", rec.line,
                        c + 1);
      }
      if (v < 0.0) {
        throw DataError(DataErrorCode::NegativeValue,
                        "negative value " + std::string(cell), rec.line, c + 1);
      }
      row.push_back(v == 0.0 ? 0.0 : v);  // fold -0
    }
    items.push_back(std::move(item));
    values.push_back(std::move(row));
  }
  return RankingDataset::make(std::move(items), std::move(periods), std::move(values));
}

inline RankingDataset parse_dataset(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_dataset(std::string_view(text));
}

/// Inverse of parse_dataset; values use shortest round-trip formatting.
inline std::string serialize_dataset(const RankingDataset& ds) {
  std::string out = "item,category";
  for (const auto& p : ds.periods()) {
    out += ',';
    out += csv::quote(p);
  }
  out += '\n';
  for (std::size_t i = 0; i < ds.item_count(); ++i) {
    out += csv::quote(ds.items()[i].id);
    out += ',';
    out += csv::quote(ds.items()[i].category);
    for (double v : ds.values()[i]) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

/// Returns a copy of `ds` with one cell replaced.
inline RankingDataset edit_cell(const RankingDataset& ds, std::string_view item_id,
                                std::string_view period_label, double new_value) {
  const auto item = ds.find_item(item_id);
  if (!item) {
    throw DataError(DataErrorCode::UnknownItem,
                    "no item '" + std::string(item_id) + "'");
  }
  const auto period = ds.find_period(period_label);
  if (!period) {
    throw DataError(DataErrorCode::UnknownPeriod,
                    "no period '" + std::string(period_label) + "'");
  }
  if (!std::isfinite(new_value)) {
    throw DataError(DataErrorCode::NonNumericValue, "non-finite value");
  }
  if (new_value < 0.0) {
    throw DataError(DataErrorCode::NegativeValue, "negative value");
  }
  auto values = ds.values();
  values[*item][*period] = new_value == 0.0 ? 0.0 : new_value;
  return RankingDataset::make(ds.items(), ds.periods(), std::move(values));
}

}  // namespace foreshadow
