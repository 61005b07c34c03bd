#pragma once

// JSON encodings shared by scene documents, the HTTP API, the CLI and the
// animation manifest. Decoders accept partial objects where noted and fill
// the rest from defaults; malformed input raises SchemaError.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "foreshadow/dataset.hpp"
#include "foreshadow/effects.hpp"
#include "foreshadow/events.hpp"
#include "foreshadow/svg_renderer.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

using Json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& message)
      : std::runtime_error("SchemaError: " + message) {}
};

namespace json_detail {

inline const Json& require(const Json& j, std::string_view key) {
  if (!j.is_object()) throw SchemaError("expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError("missing field '" + std::string(key) + "'");
  return *it;
}

template <typename T>
T get(const Json& j, std::string_view key) {
  try {
    return require(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("field '" + std::string(key) + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, std::string_view key, T fallback) {
  if (!j.is_object()) throw SchemaError("expected an object");
  if (!j.contains(key)) return fallback;
  return get<T>(j, key);
}

inline Rgb color(const Json& j, std::string_view key) {
  const auto text = get<std::string>(j, key);
  auto rgb = Rgb::from_hex(text);
  if (!rgb) throw SchemaError("field '" + std::string(key) + "': expected #rrggbb color");
  return *rgb;
}

}  // namespace json_detail

// --- dataset ---------------------------------------------------------------

inline Json to_json(const RankingDataset& ds) {
  Json items = Json::array();
  for (std::size_t i = 0; i < ds.item_count(); ++i) {
    items.push_back({{"id", ds.items()[i].id},
                     {"category", ds.items()[i].category},
                     {"values", ds.values()[i]}});
  }
  return {{"periods", ds.periods()}, {"items", std::move(items)}};
}

inline RankingDataset dataset_from_json(const Json& j) {
  using namespace json_detail;
  auto periods = get<std::vector<std::string>>(j, "periods");
  std::vector<ItemRecord> items;
  std::vector<std::vector<double>> values;
  const auto& arr = require(j, "items");
  if (!arr.is_array()) throw SchemaError("'items' must be an array");
  for (const auto& it : arr) {
    items.push_back({get<std::string>(it, "id"),
                     get_or<std::string>(it, "category", std::string(kDefaultCategory))});
    values.push_back(get<std::vector<double>>(it, "values"));
  }
  return RankingDataset::make(std::move(items), std::move(periods), std::move(values));
}

// --- settings ----------------------------------------------------------------

inline Json to_json(const AnimationSettings& s) {
  return {{"seconds_per_period", s.seconds_per_period},
          {"fps", s.fps},
          {"top_n", s.top_n},
          {"easing", to_string(s.easing)}};
}

inline Easing easing_from_string(std::string_view s) {
  if (s == "linear") return Easing::Linear;
  if (s == "cubic_in_out") return Easing::CubicInOut;
  throw SchemaError("unknown easing '" + std::string(s) + "'");
}

/// Missing fields keep the values from `base`.
inline AnimationSettings settings_from_json(const Json& j, AnimationSettings base = {}) {
  using namespace json_detail;
  if (!j.is_object()) throw SchemaError("settings must be an object");
  base.seconds_per_period = get_or(j, "seconds_per_period", base.seconds_per_period);
  base.fps = get_or(j, "fps", base.fps);
  base.top_n = get_or(j, "top_n", base.top_n);
  if (j.contains("easing")) base.easing = easing_from_string(get<std::string>(j, "easing"));
  return base;
}

// --- canvas ------------------------------------------------------------------

inline Json to_json(const CanvasSpec& c) {
  Json palette = Json::array();
  for (const auto& [cat, rgb] : c.category_palette) {
    palette.push_back({{"category", cat}, {"color", rgb.hex()}});
  }
  return {{"width", c.width},
          {"height", c.height},
          {"margins",
           {{"top", c.margins.top},
            {"right", c.margins.right},
            {"bottom", c.margins.bottom},
            {"left", c.margins.left}}},
          {"bar_height_fraction", c.bar_height_fraction},
          {"title", c.title},
          {"palette", std::move(palette)}};
}

/// Missing fields keep the values from `base`.
inline CanvasSpec canvas_from_json(const Json& j, CanvasSpec base = {}) {
  using namespace json_detail;
  if (!j.is_object()) throw SchemaError("canvas must be an object");
  base.width = get_or(j, "width", base.width);
  base.height = get_or(j, "height", base.height);
  if (j.contains("margins")) {
    const auto& m = j.at("margins");
    base.margins.top = get_or(m, "top", base.margins.top);
    base.margins.right = get_or(m, "right", base.margins.right);
    base.margins.bottom = get_or(m, "bottom", base.margins.bottom);
    base.margins.left = get_or(m, "left", base.margins.left);
  }
  base.bar_height_fraction = get_or(j, "bar_height_fraction", base.bar_height_fraction);
  base.title = get_or(j, "title", base.title);
  if (j.contains("palette")) {
    base.category_palette.clear();
    for (const auto& e : j.at("palette")) {
      base.category_palette.emplace_back(get<std::string>(e, "category"), color(e, "color"));
    }
  }
  return base;
}

// --- foreshadow specs ----------------------------------------------------------

inline Json to_json(const Effect& e) {
  Json j = {{"kind", to_string(kind_of(e))}};
  if (const auto* p = std::get_if<Prologue>(&e)) j["text"] = p->text;
  if (const auto* c = std::get_if<Contour>(&e)) {
    j["stroke_width"] = c->stroke_width;
    j["color"] = c->color.hex();
  }
  if (const auto* d = std::get_if<DeEmphasis>(&e)) j["off_target_opacity"] = d->off_target_opacity;
  return j;
}

inline Effect effect_from_json(const Json& j) {
  using namespace json_detail;
  const auto kind = get<std::string>(j, "kind");
  if (kind == "prologue") return Prologue{get<std::string>(j, "text")};
  if (kind == "pre_scene") return PreScene{};
  if (kind == "contour") {
    Contour c;
    c.stroke_width = get_or(j, "stroke_width", c.stroke_width);
    if (j.contains("color")) c.color = color(j, "color");
    return c;
  }
  if (kind == "de_emphasis") {
    return DeEmphasis{get_or(j, "off_target_opacity", kDefaultOffTargetOpacity)};
  }
  throw SchemaError("unknown effect kind '" + kind + "'");
}

inline Json to_json(const ForeshadowSpec& s) {
  Json effects = Json::array();
  for (const auto& e : s.effects) effects.push_back(to_json(e));
  return {{"id", s.id},
          {"effects", std::move(effects)},
          {"target_items", s.target_items},
          {"timing", s.timing},
          {"duration", s.duration},
          {"target_period", s.target_period}};
}

inline ForeshadowSpec spec_from_json(const Json& j) {
  using namespace json_detail;
  ForeshadowSpec s;
  s.id = get<std::string>(j, "id");
  const auto& effects = require(j, "effects");
  if (!effects.is_array()) throw SchemaError("'effects' must be an array");
  for (const auto& e : effects) s.effects.push_back(effect_from_json(e));
  s.target_items = get<std::vector<std::string>>(j, "target_items");
  s.timing = get<double>(j, "timing");
  s.duration = get<double>(j, "duration");
  s.target_period = get<double>(j, "target_period");
  return s;
}

inline std::vector<ForeshadowSpec> specs_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("'specs' must be an array");
  std::vector<ForeshadowSpec> out;
  for (const auto& s : j) out.push_back(spec_from_json(s));
  return out;
}

inline Json to_json(const std::vector<ForeshadowSpec>& specs) {
  Json arr = Json::array();
  for (const auto& s : specs) arr.push_back(to_json(s));
  return arr;
}

// --- derived values --------------------------------------------------------------

inline Json to_json(const Violation& v) {
  return {{"code", to_string(v.code)}, {"spec_id", v.spec_id}, {"message", v.message}};
}

inline Json to_json(const std::vector<Violation>& vs) {
  Json arr = Json::array();
  for (const auto& v : vs) arr.push_back(to_json(v));
  return arr;
}

inline Json to_json(const ActiveInterval& i) {
  return {{"spec_id", i.spec_id},
          {"start_s", i.start_s},
          {"end_s", i.end_s},
          {"target_period_s", i.target_period_s}};
}

inline Json to_json(const std::vector<ActiveInterval>& is) {
  Json arr = Json::array();
  for (const auto& i : is) arr.push_back(to_json(i));
  return arr;
}

inline Json to_json(const KeyEvent& e) {
  Json j = {{"kind", to_string(e.kind)},
            {"item_id", e.item_id},
            {"period_index", e.period_index},
            {"magnitude", e.magnitude}};
  if (!e.other_item_id.empty()) j["other_item_id"] = e.other_item_id;
  return j;
}

}  // namespace foreshadow
