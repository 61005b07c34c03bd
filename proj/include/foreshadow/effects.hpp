#pragma once

// Visual foreshadowing: an effect (or several) shown over a time window that
// closes at or before the data event it anticipates.
//
// Four effects are supported. Prologue and PreScene state the outcome
// (explicit); Contour and DeEmphasis only point at the items involved
// (implicit). Timing, duration and target period are authored in period
// units and converted to seconds against the animation settings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "foreshadow/dataset.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
  }

  static std::optional<Rgb> from_hex(std::string_view s) {
    if (s.size() != 7 || s[0] != '#') return std::nullopt;
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      return -1;
    };
    int v[6];
    for (int i = 0; i < 6; ++i) {
      v[i] = nibble(s[static_cast<std::size_t>(i) + 1]);
      if (v[i] < 0) return std::nullopt;
    }
    return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]),
               static_cast<std::uint8_t>(v[2] * 16 + v[3]),
               static_cast<std::uint8_t>(v[4] * 16 + v[5])};
  }

  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

struct Prologue {
  std::string text;
  friend bool operator==(const Prologue&, const Prologue&) = default;
};

struct PreScene {
  friend bool operator==(const PreScene&, const PreScene&) = default;
};

struct Contour {
  double stroke_width = 3.0;
  Rgb color{40, 40, 40};
  friend bool operator==(const Contour&, const Contour&) = default;
};

inline constexpr double kDefaultOffTargetOpacity = 0.2;

struct DeEmphasis {
  double off_target_opacity = kDefaultOffTargetOpacity;
  friend bool operator==(const DeEmphasis&, const DeEmphasis&) = default;
};

using Effect = std::variant<Prologue, PreScene, Contour, DeEmphasis>;

enum class EffectKind { Prologue, PreScene, Contour, DeEmphasis };

inline EffectKind kind_of(const Effect& e) {
  return static_cast<EffectKind>(e.index());
}

inline std::string_view to_string(EffectKind k) {
  switch (k) {
    case EffectKind::Prologue: return "prologue";
    case EffectKind::PreScene: return "pre_scene";
    case EffectKind::Contour: return "contour";
    case EffectKind::DeEmphasis: return "de_emphasis";
  }
  return "unknown";
}

enum class ForeshadowClass { Explicit, Implicit };

inline std::string_view to_string(ForeshadowClass c) {
  return c == ForeshadowClass::Explicit ? "explicit" : "implicit";
}

/// Explicit effects reveal the outcome; implicit ones only highlight.
constexpr ForeshadowClass classify(EffectKind k) {
  switch (k) {
    case EffectKind::Prologue:
    case EffectKind::PreScene:
      return ForeshadowClass::Explicit;
    case EffectKind::Contour:
    case EffectKind::DeEmphasis:
      return ForeshadowClass::Implicit;
  }
  return ForeshadowClass::Implicit;
}

inline ForeshadowClass classify(const Effect& e) { return classify(kind_of(e)); }

struct ForeshadowSpec {
  std::string id;
  std::vector<Effect> effects;
  std::vector<std::string> target_items;
  double timing = 0.0;         // start, period units
  double duration = 1.0;       // period units
  double target_period = 1.0;  // the anticipated event, period units

  friend bool operator==(const ForeshadowSpec&, const ForeshadowSpec&) = default;
};

enum class ViolationCode {
  EmptySpecId,
  DuplicateSpecId,
  NoEffects,
  NoTargets,
  UnknownTargetItem,
  DuplicateTargetItem,
  NonFiniteNumber,
  NegativeTiming,
  NonPositiveDuration,
  EndsAfterEvent,
  TargetPeriodOutOfRange,
  EmptyPrologueText,
  InvalidOpacity,
  InvalidStrokeWidth,
};

inline std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::EmptySpecId: return "EmptySpecId";
    case ViolationCode::DuplicateSpecId: return "DuplicateSpecId";
    case ViolationCode::NoEffects: return "NoEffects";
    case ViolationCode::NoTargets: return "NoTargets";
    case ViolationCode::UnknownTargetItem: return "UnknownTargetItem";
    case ViolationCode::DuplicateTargetItem: return "DuplicateTargetItem";
    case ViolationCode::NonFiniteNumber: return "NonFiniteNumber";
    case ViolationCode::NegativeTiming: return "NegativeTiming";
    case ViolationCode::NonPositiveDuration: return "NonPositiveDuration";
    case ViolationCode::EndsAfterEvent: return "EndsAfterEvent";
    case ViolationCode::TargetPeriodOutOfRange: return "TargetPeriodOutOfRange";
    case ViolationCode::EmptyPrologueText: return "EmptyPrologueText";
    case ViolationCode::InvalidOpacity: return "InvalidOpacity";
    case ViolationCode::InvalidStrokeWidth: return "InvalidStrokeWidth";
  }
  return "Unknown";
}

struct Violation {
  ViolationCode code;
  std::string spec_id;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// What a spec is checked against: the item ids and period count of the
/// dataset (or of a timeline compiled from it).
struct SpecContext {
  std::vector<std::string> item_ids;
  std::size_t period_count = 0;

  static SpecContext of(const RankingDataset& ds) {
    return {ds.item_ids(), ds.period_count()};
  }
  static SpecContext of(const KeyframeTimeline& tl) {
    return {tl.item_ids(), tl.period_count()};
  }
};

/// Every violated invariant of `spec`; empty means valid.
inline std::vector<Violation> validate_spec(const ForeshadowSpec& spec,
                                            const SpecContext& ctx) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode c, std::string msg) {
    out.push_back({c, spec.id, std::move(msg)});
  };

  if (spec.id.empty()) add(ViolationCode::EmptySpecId, "spec id is empty");
  if (spec.effects.empty()) add(ViolationCode::NoEffects, "no visual effect given");
  for (const auto& e : spec.effects) {
    if (const auto* p = std::get_if<Prologue>(&e); p && p->text.empty()) {
      add(ViolationCode::EmptyPrologueText, "prologue text is empty");
    }
    if (const auto* d = std::get_if<DeEmphasis>(&e)) {
      const double o = d->off_target_opacity;
      if (!(o > 0.0 && o <= 1.0)) {
        add(ViolationCode::InvalidOpacity,
            "off-target opacity " + format_number(o) + " not in (0, 1]");
      }
    }
    if (const auto* c = std::get_if<Contour>(&e)) {
      if (!(c->stroke_width > 0.0) || !std::isfinite(c->stroke_width)) {
        add(ViolationCode::InvalidStrokeWidth, "contour stroke width must be positive");
      }
    }
  }

  if (spec.target_items.empty()) add(ViolationCode::NoTargets, "no target items");
  for (std::size_t i = 0; i < spec.target_items.size(); ++i) {
    const auto& t = spec.target_items[i];
    if (std::find(ctx.item_ids.begin(), ctx.item_ids.end(), t) == ctx.item_ids.end()) {
      add(ViolationCode::UnknownTargetItem, "unknown target item '" + t + "'");
    }
    if (std::find(spec.target_items.begin(), spec.target_items.begin() + i, t) !=
        spec.target_items.begin() + i) {
      add(ViolationCode::DuplicateTargetItem, "target item '" + t + "' listed twice");
    }
  }

  if (!std::isfinite(spec.timing) || !std::isfinite(spec.duration) ||
      !std::isfinite(spec.target_period)) {
    add(ViolationCode::NonFiniteNumber, "timing, duration and target_period must be finite");
    return out;
  }
  if (spec.timing < 0.0) {
    add(ViolationCode::NegativeTiming, "timing " + format_number(spec.timing) + " < 0");
  }
  if (!(spec.duration > 0.0)) {
    add(ViolationCode::NonPositiveDuration,
        "duration " + format_number(spec.duration) + " must be > 0");
  }
  if (spec.timing + spec.duration > spec.target_period) {
    add(ViolationCode::EndsAfterEvent,
        "effect ends at period " + format_number(spec.timing + spec.duration) +
            ", after the event at " + format_number(spec.target_period));
  }
  const double last = static_cast<double>(ctx.period_count) - 1.0;
  if (spec.target_period < 0.0 || spec.target_period > last) {
    add(ViolationCode::TargetPeriodOutOfRange,
        "target period " + format_number(spec.target_period) + " outside [0, " +
            format_number(last) + "]");
  }
  return out;
}

inline std::vector<Violation> validate_spec(const ForeshadowSpec& spec,
                                            const RankingDataset& ds) {
  return validate_spec(spec, SpecContext::of(ds));
}

/// Validates each spec and the uniqueness of spec ids across the list.
inline std::vector<Violation> validate_specs(const std::vector<ForeshadowSpec>& specs,
                                             const SpecContext& ctx) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto v = validate_spec(specs[i], ctx);
    out.insert(out.end(), v.begin(), v.end());
    for (std::size_t j = 0; j < i; ++j) {
      if (!specs[i].id.empty() && specs[j].id == specs[i].id) {
        out.push_back({ViolationCode::DuplicateSpecId, specs[i].id,
                       "spec id '" + specs[i].id + "' used more than once"});
        break;
      }
    }
  }
  return out;
}

class ForeshadowError : public std::runtime_error {
 public:
  explicit ForeshadowError(std::vector<Violation> violations)
      : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string msg = "UnvalidatedSpec";
    if (!v.empty()) {
      msg += ": ";
      msg += to_string(v.front().code);
      msg += " (" + v.front().spec_id + ") " + v.front().message;
    }
    return msg;
  }

  std::vector<Violation> violations_;
};

/// [start_s, end_s) window in which a spec is active.
struct ActiveWindow {
  double start_s = 0.0;
  double end_s = 0.0;
};

inline ActiveWindow active_window(const ForeshadowSpec& spec, const AnimationSettings& s) {
  return {spec.timing * s.seconds_per_period,
          (spec.timing + spec.duration) * s.seconds_per_period};
}

inline bool is_active(const ForeshadowSpec& spec, const AnimationSettings& s, double time_s) {
  const auto w = active_window(spec, s);
  return w.start_s <= time_s && time_s < w.end_s;
}

struct ContourStyle {
  double stroke_width = 3.0;
  Rgb color{40, 40, 40};
  friend bool operator==(const ContourStyle&, const ContourStyle&) = default;
};

struct ItemStyle {
  double opacity = 1.0;
  std::optional<ContourStyle> contour;
  friend bool operator==(const ItemStyle&, const ItemStyle&) = default;
};

/// Final-state geometry of a PreScene target, taken from the boundary frame
/// of its target period. `scale_max` is that frame's width normalization so
/// the ghost renders exactly as the real bar will.
struct Ghost {
  std::string item_id;
  std::size_t item_index = 0;
  double target_period = 0.0;
  double slot_position = 0.0;
  double value = 0.0;
  double scale_max = 0.0;
  int rank = 0;

  friend bool operator==(const Ghost&, const Ghost&) = default;
};

struct StyleOverlay {
  std::vector<ItemStyle> items;  // timeline item order
  std::optional<std::string> banner_text;
  std::vector<Ghost> ghosts;     // sorted by (item_id, target_period)

  static StyleOverlay neutral(std::size_t item_count) {
    StyleOverlay o;
    o.items.resize(item_count);
    return o;
  }

  friend bool operator==(const StyleOverlay&, const StyleOverlay&) = default;
};

inline constexpr std::string_view kBannerSeparator = " — ";

/// Resolves the style overlay for one frame.
///
/// Overlapping specs compose commutatively: per-item opacity is the minimum
/// over active DeEmphasis effects, contours are merged keeping the widest
/// stroke (darkest color on ties), banners are joined in spec-id order and
/// ghosts are unioned. Throws ForeshadowError when a spec does not validate
/// against the timeline.
inline StyleOverlay resolve_styles(const std::vector<ForeshadowSpec>& specs,
                                   const FrameState& frame,
                                   const KeyframeTimeline& timeline) {
  const auto ctx = SpecContext::of(timeline);
  auto violations = validate_specs(specs, ctx);
  if (!violations.empty()) throw ForeshadowError(std::move(violations));

  auto overlay = StyleOverlay::neutral(timeline.items.size());
  std::vector<std::pair<std::string, std::string>> banners;
  const auto& ids = ctx.item_ids;
  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };

  for (const auto& spec : specs) {
    if (!is_active(spec, timeline.settings, frame.time_s)) continue;

    std::vector<bool> is_target(ids.size(), false);
    for (const auto& t : spec.target_items) is_target[index_of(t)] = true;

    for (const auto& effect : spec.effects) {
      if (const auto* p = std::get_if<Prologue>(&effect)) {
        banners.emplace_back(spec.id, p->text);
      } else if (const auto* d = std::get_if<DeEmphasis>(&effect)) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!is_target[i]) {
            overlay.items[i].opacity = std::min(overlay.items[i].opacity, d->off_target_opacity);
          }
        }
      } else if (const auto* c = std::get_if<Contour>(&effect)) {
        const ContourStyle style{c->stroke_width, c->color};
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!is_target[i]) continue;
          auto& current = overlay.items[i].contour;
          if (!current ||
              std::tie(style.stroke_width, current->color) >
                  std::tie(current->stroke_width, style.color)) {
            current = style;
          }
        }
      } else if (std::holds_alternative<PreScene>(effect)) {
        const auto& target_frame =
            timeline.frames[timeline.frame_index_for_period(spec.target_period)];
        const double scale = visible_max_value(target_frame);
        for (const auto& t : spec.target_items) {
          const auto i = index_of(t);
          const auto& state = target_frame.items[i];
          overlay.ghosts.push_back(
              {t, i, spec.target_period, state.slot_position, state.value, scale, state.rank});
        }
      }
    }
  }

  std::sort(banners.begin(), banners.end());
  banners.erase(std::unique(banners.begin(), banners.end()), banners.end());
  if (!banners.empty()) {
    std::string text;
    for (std::size_t i = 0; i < banners.size(); ++i) {
      if (i) text += kBannerSeparator;
      text += banners[i].second;
    }
    overlay.banner_text = std::move(text);
  }

  auto ghost_key = [](const Ghost& g) {
    return std::tie(g.item_id, g.target_period, g.slot_position, g.value, g.scale_max);
  };
  std::sort(overlay.ghosts.begin(), overlay.ghosts.end(),
            [&](const Ghost& a, const Ghost& b) { return ghost_key(a) < ghost_key(b); });
  overlay.ghosts.erase(std::unique(overlay.ghosts.begin(), overlay.ghosts.end()),
                       overlay.ghosts.end());
  return overlay;
}

struct ActiveInterval {
  std::string spec_id;
  double start_s = 0.0;
  double end_s = 0.0;
  double target_period_s = 0.0;

  friend bool operator==(const ActiveInterval&, const ActiveInterval&) = default;
};

/// Activity windows in seconds, sorted by start then spec id.
inline std::vector<ActiveInterval> active_intervals(const std::vector<ForeshadowSpec>& specs,
                                                    const AnimationSettings& settings) {
  std::vector<ActiveInterval> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    const auto w = active_window(spec, settings);
    out.push_back({spec.id, w.start_s, w.end_s, spec.target_period * settings.seconds_per_period});
  }
  std::sort(out.begin(), out.end(), [](const ActiveInterval& a, const ActiveInterval& b) {
    return std::tie(a.start_s, a.spec_id) < std::tie(b.start_s, b.spec_id);
  });
  return out;
}

}  // namespace foreshadow
