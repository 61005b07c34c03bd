#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "foreshadow/dataset.hpp"
#include "foreshadow/effects.hpp"
#include "foreshadow/events.hpp"

namespace foreshadow::testing {

inline RankingDataset small_dataset() {
  return parse_dataset(
      "item,category,2018,2019,2020\n"
      "A,x,10,5,1\n"
      "B,y,5,10,2\n"
      "C,x,7,7,30\n");
}

/// Random dataset; small integer values give frequent ties.
inline RankingDataset random_dataset(std::mt19937_64& rng, std::size_t max_items,
                                     std::size_t max_periods, std::size_t min_items = 1) {
  std::uniform_int_distribution<std::size_t> n_items(min_items, max_items);
  std::uniform_int_distribution<std::size_t> n_periods(2, max_periods);
  std::bernoulli_distribution coarse(0.5);
  std::uniform_int_distribution<int> small(0, 5);
  std::uniform_real_distribution<double> wide(0.0, 1000.0);
  const auto n = n_items(rng);
  const auto p = n_periods(rng);
  const bool use_small = coarse(rng);

  std::vector<ItemRecord> items;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("item" + std::to_string(i));
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < n; ++i) items.push_back({ids[i], i % 2 ? "odd" : "even"});
  std::vector<std::string> periods;
  for (std::size_t k = 0; k < p; ++k) periods.push_back(std::to_string(2000 + k));
  std::vector<std::vector<double>> values(n, std::vector<double>(p));
  for (auto& row : values) {
    for (auto& v : row) v = use_small ? small(rng) : wide(rng);
  }
  return RankingDataset::make(std::move(items), std::move(periods), std::move(values));
}

/// Rank oracle: stable sort by (-value, id).
inline std::vector<int> oracle_ranks(const std::vector<double>& values,
                                     const std::vector<std::string>& ids) {
  std::vector<std::pair<std::pair<double, std::string>, std::size_t>> keyed;
  for (std::size_t i = 0; i < values.size(); ++i) keyed.push_back({{-values[i], ids[i]}, i});
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> ranks(values.size());
  for (std::size_t pos = 0; pos < keyed.size(); ++pos) {
    ranks[keyed[pos].second] = static_cast<int>(pos) + 1;
  }
  return ranks;
}

/// Event oracle: recomputes ranks by pairwise counting and applies each rule
/// literally over every item and ordered pair.
inline std::vector<KeyEvent> oracle_events(const RankingDataset& ds, int top_n, int jump) {
  const auto ids = ds.item_ids();
  const std::size_t n = ids.size();
  auto rank_at = [&](std::size_t period) {
    std::vector<int> r(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double vi = ds.value(i, period), vj = ds.value(j, period);
        if (vj > vi || (vj == vi && ids[j] < ids[i])) ++r[i];
      }
    }
    return r;
  };
  std::vector<KeyEvent> out;
  for (std::size_t p = 1; p < ds.period_count(); ++p) {
    const auto r0 = rank_at(p - 1);
    const auto r1 = rank_at(p);
    for (std::size_t i = 0; i < n; ++i) {
      const int d = r1[i] > r0[i] ? r1[i] - r0[i] : r0[i] - r1[i];
      if (r1[i] == 1 && r0[i] != 1) out.push_back({EventKind::NewLeader, ids[i], p, d, {}});
      if (r0[i] > top_n && r1[i] <= top_n) out.push_back({EventKind::EntersTopN, ids[i], p, d, {}});
      if (r0[i] <= top_n && r1[i] > top_n) out.push_back({EventKind::ExitsTopN, ids[i], p, d, {}});
      if (d >= jump) out.push_back({EventKind::RankJump, ids[i], p, d, {}});
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const bool swapped = r0[a] > r0[b] && r1[a] < r1[b];
        const bool both_top = r1[a] <= top_n && r1[b] <= top_n;
        if (a != b && swapped && both_top) {
          const int d = r1[a] > r0[a] ? r1[a] - r0[a] : r0[a] - r1[a];
          out.push_back({EventKind::Overtake, ids[a], p, d, ids[b]});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const KeyEvent& x, const KeyEvent& y) {
    if (x.period_index != y.period_index) return x.period_index < y.period_index;
    if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    if (x.item_id != y.item_id) return x.item_id < y.item_id;
    return x.other_item_id < y.other_item_id;
  });
  return out;
}

/// Random spec against `ds`. Always valid when `valid` is true; otherwise
/// its window ends after the event.
inline ForeshadowSpec random_spec(std::mt19937_64& rng, const RankingDataset& ds,
                                  const std::string& id, bool valid = true) {
  const double last = static_cast<double>(ds.period_count() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ForeshadowSpec s;
  s.id = id;
  s.target_period = std::max(0.25, std::round(unit(rng) * last * 4.0) / 4.0);
  s.target_period = std::min(s.target_period, last);
  if (valid) {
    s.timing = std::floor(unit(rng) * s.target_period * 4.0) / 4.0;
    if (s.timing >= s.target_period) s.timing = 0.0;
    const double room = s.target_period - s.timing;
    s.duration = std::max(room * 0.25, std::round(unit(rng) * room * 4.0) / 4.0);
    if (s.timing + s.duration > s.target_period) s.duration = room;
  } else {
    s.timing = std::floor(unit(rng) * s.target_period * 4.0) / 4.0;
    s.duration = (s.target_period - s.timing) + 0.25 + unit(rng);
  }
  const auto ids = ds.item_ids();
  std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
  s.target_items = {ids[pick(rng)]};
  if (ids.size() > 2 && unit(rng) < 0.3) {
    const auto other = ids[pick(rng)];
    if (other != s.target_items.front()) s.target_items.push_back(other);
  }
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: s.effects = {Prologue{"watch " + s.target_items.front()}}; break;
    case 1: s.effects = {PreScene{}}; break;
    case 2: s.effects = {Contour{1.0 + std::round(unit(rng) * 4.0), Rgb{40, 40, 40}}}; break;
    default: s.effects = {DeEmphasis{0.1 + std::round(unit(rng) * 8.0) / 10.0}}; break;
  }
  if (unit(rng) < 0.3) s.effects.push_back(DeEmphasis{});
  return s;
}

// --- SVG inspection ------------------------------------------------------------

using Attributes = std::map<std::string, std::string>;

/// Attributes of every `<tag ...>` element with class `cls`, in document order.
inline std::vector<Attributes> elements(const std::string& svg, const std::string& tag,
                                        const std::string& cls) {
  static const std::regex attr_re(R"(([a-zA-Z_:][-a-zA-Z0-9_:.]*)=\"([^\"]*)\")");
  const std::regex tag_re("<" + tag + R"(\s[^>]*>)");
  std::vector<Attributes> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag_re);
       it != std::sregex_iterator(); ++it) {
    const std::string text = it->str();
    Attributes attrs;
    for (auto a = std::sregex_iterator(text.begin(), text.end(), attr_re);
         a != std::sregex_iterator(); ++a) {
      attrs[(*a)[1]] = (*a)[2];
    }
    if (attrs.count("class") && attrs["class"] == cls) out.push_back(std::move(attrs));
  }
  return out;
}

inline std::map<std::string, Attributes> bars_by_item(const std::string& svg) {
  std::map<std::string, Attributes> out;
  for (auto& a : elements(svg, "rect", "bar")) out[a["data-item"]] = a;
  return out;
}

/// Text content of the first `<text class="cls">`, if any.
inline std::optional<std::string> text_of(const std::string& svg, const std::string& cls) {
  const std::regex re("<text class=\"" + cls + "\"[^>]*>([^<]*)</text>");
  std::smatch m;
  if (std::regex_search(svg, m, re)) return m[1].str();
  return std::nullopt;
}

inline std::string unescape_xml(std::string s) {
  const std::pair<const char*, const char*> table[] = {
      {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&"}};
  for (const auto& [from, to] : table) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += 1) {
      s.replace(pos, std::strlen(from), to);
    }
  }
  return s;
}

// --- files -------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

/// Name -> bytes for every regular file directly inside `dir`.
inline std::map<std::string, std::string> directory_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("foreshadow-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace foreshadow::testing
