#pragma once

// Byte-deterministic SVG rendering of one styled bar-race frame.
//
// Output depends only on the arguments: numbers use fixed 6-significant-digit
// formatting, attributes are emitted in a fixed order and nothing time- or
// locale-dependent is written.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foreshadow/effects.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

enum class RenderErrorCode { EmptyVisibleSet, InvalidCanvas, IoFailure };

inline std::string_view to_string(RenderErrorCode c) {
  switch (c) {
    case RenderErrorCode::EmptyVisibleSet: return "EmptyVisibleSet";
    case RenderErrorCode::InvalidCanvas: return "InvalidCanvas";
    case RenderErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

class RenderError : public std::runtime_error {
 public:
  RenderError(RenderErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  RenderErrorCode code() const noexcept { return code_; }

 private:
  RenderErrorCode code_;
};

struct Margins {
  double top = 80.0;
  double right = 60.0;
  double bottom = 30.0;
  double left = 160.0;
  friend bool operator==(const Margins&, const Margins&) = default;
};

struct CanvasSpec {
  int width = 960;
  int height = 540;
  Margins margins;
  double bar_height_fraction = 0.8;
  std::string title;
  // Explicit colors; categories not listed take the default palette in
  // first-appearance order.
  std::vector<std::pair<std::string, Rgb>> category_palette;

  double chart_width() const { return width - margins.left - margins.right; }
  double chart_height() const { return height - margins.top - margins.bottom; }

  friend bool operator==(const CanvasSpec&, const CanvasSpec&) = default;
};

inline void check_canvas(const CanvasSpec& c) {
  const auto& m = c.margins;
  if (c.width <= 0 || c.height <= 0) {
    throw RenderError(RenderErrorCode::InvalidCanvas, "canvas size must be positive");
  }
  if (!(m.top >= 0 && m.right >= 0 && m.bottom >= 0 && m.left >= 0)) {
    throw RenderError(RenderErrorCode::InvalidCanvas, "margins must be non-negative");
  }
  if (!(c.chart_width() > 0.0) || !(c.chart_height() > 0.0)) {
    throw RenderError(RenderErrorCode::InvalidCanvas, "no drawable area left after margins");
  }
  if (!(c.bar_height_fraction > 0.0 && c.bar_height_fraction < 1.0)) {
    throw RenderError(RenderErrorCode::InvalidCanvas, "bar_height_fraction must be in (0, 1)");
  }
}

// Tableau 10.
inline constexpr std::array<Rgb, 10> kDefaultPalette{{
    {78, 121, 167}, {242, 142, 43}, {225, 87, 89}, {118, 183, 178}, {89, 161, 79},
    {237, 201, 72}, {176, 122, 161}, {255, 157, 167}, {156, 117, 95}, {186, 176, 172},
}};

/// One color per item, stable for the whole animation.
inline std::vector<Rgb> item_colors(const std::vector<ItemRecord>& items,
                                    const CanvasSpec& canvas) {
  std::vector<std::pair<std::string, Rgb>> assigned;
  std::size_t next_default = 0;
  auto color_for = [&](const std::string& category) {
    for (const auto& [cat, rgb] : assigned) {
      if (cat == category) return rgb;
    }
    Rgb rgb = kDefaultPalette[next_default % kDefaultPalette.size()];
    bool explicit_color = false;
    for (const auto& [cat, c] : canvas.category_palette) {
      if (cat == category) {
        rgb = c;
        explicit_color = true;
        break;
      }
    }
    if (!explicit_color) ++next_default;
    assigned.emplace_back(category, rgb);
    return rgb;
  };
  std::vector<Rgb> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(color_for(it.category));
  return out;
}

namespace svg {

inline std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace svg

inline constexpr double kGhostFillOpacity = 0.35;
inline constexpr std::string_view kGhostDash = "6 4";

/// Bar geometry shared by real bars and PreScene ghosts so both land on the
/// same pixels for the same (value, slot, scale).
struct BarGeometry {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

inline BarGeometry bar_geometry(double value, double slot_position, double scale_max,
                                const CanvasSpec& canvas, int top_n) {
  const double pitch = canvas.chart_height() / top_n;
  BarGeometry g;
  g.height = pitch * canvas.bar_height_fraction;
  g.x = canvas.margins.left;
  g.y = canvas.margins.top + (slot_position - 1.0) * pitch + (pitch - g.height) / 2.0;
  g.width = scale_max > 0.0 ? value / scale_max * canvas.chart_width() : 0.0;
  return g;
}

/// Renders `frame` of `timeline` with `overlay` applied.
inline std::string render_frame(const FrameState& frame, const StyleOverlay& overlay,
                                const CanvasSpec& canvas, const KeyframeTimeline& timeline) {
  using svg::escape;
  using svg::num;
  check_canvas(canvas);
  const auto& settings = timeline.settings;

  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < frame.items.size(); ++i) {
    if (frame.items[i].visible) visible.push_back(i);
  }
  if (visible.empty()) {
    throw RenderError(RenderErrorCode::EmptyVisibleSet,
                      "no item within the visible slots at frame " + std::to_string(frame.index));
  }
  const double scale = visible_max_value(frame);
  const auto colors = item_colors(timeline.items, canvas);
  const auto& m = canvas.margins;
  const double font = std::min(14.0, canvas.chart_height() / settings.top_n * 0.6);

  std::string out;
  out.reserve(4096);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(canvas.width) + "\" height=\"" + std::to_string(canvas.height) +
         "\" viewBox=\"0 0 " + std::to_string(canvas.width) + " " +
         std::to_string(canvas.height) + "\" font-family=\"sans-serif\">\n";
  out += "<defs><clipPath id=\"plot\"><rect x=\"0\" y=\"" + num(m.top) + "\" width=\"" +
         std::to_string(canvas.width) + "\" height=\"" + num(canvas.chart_height()) +
         "\"/></clipPath></defs>\n";
  out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + std::to_string(canvas.width) +
         "\" height=\"" + std::to_string(canvas.height) + "\" fill=\"#ffffff\"/>\n";
  if (!canvas.title.empty()) {
    out += "<text class=\"title\" x=\"" + num(m.left) + "\" y=\"28\" font-size=\"20\">" +
           escape(canvas.title) + "</text>\n";
  }
  if (overlay.banner_text) {
    out += "<text class=\"prologue\" x=\"" + num(m.left) + "\" y=\"54\" font-size=\"15\">" +
           escape(*overlay.banner_text) + "</text>\n";
  }
  out += "<text class=\"period\" x=\"" + num(canvas.width - m.right) + "\" y=\"" +
         num(canvas.height - m.bottom - 10.0) +
         "\" font-size=\"36\" text-anchor=\"end\" fill=\"#999999\">" +
         escape(timeline.periods.at(frame.nearest_period)) + "</text>\n";

  out += "<g class=\"bars\" clip-path=\"url(#plot)\">\n";
  for (std::size_t i : visible) {
    const auto& it = frame.items[i];
    const auto& style = overlay.items.at(i);
    const auto g = bar_geometry(it.value, it.slot_position, scale, canvas, settings.top_n);
    const std::string opacity = num(style.opacity);
    out += "<rect class=\"bar\" data-item=\"" + escape(timeline.items[i].id) + "\" x=\"" +
           num(g.x) + "\" y=\"" + num(g.y) + "\" width=\"" + num(g.width) + "\" height=\"" +
           num(g.height) + "\" fill=\"" + colors[i].hex() + "\" opacity=\"" + opacity + "\"";
    if (style.contour) {
      out += " stroke=\"" + style.contour->color.hex() + "\" stroke-width=\"" +
             num(style.contour->stroke_width) + "\"";
    }
    out += "/>\n";
    const double text_y = g.y + g.height / 2.0 + font * 0.35;
    out += "<text class=\"label\" x=\"" + num(g.x - 6.0) + "\" y=\"" + num(text_y) +
           "\" font-size=\"" + num(font) + "\" text-anchor=\"end\" opacity=\"" + opacity + "\">" +
           escape(timeline.items[i].id) + "</text>\n";
    out += "<text class=\"value\" x=\"" + num(g.x + g.width + 4.0) + "\" y=\"" + num(text_y) +
           "\" font-size=\"" + num(font) + "\" opacity=\"" + opacity + "\">" + num(it.value) +
           "</text>\n";
  }
  for (const auto& ghost : overlay.ghosts) {
    const auto g = bar_geometry(ghost.value, ghost.slot_position, ghost.scale_max, canvas,
                                settings.top_n);
    const auto color = colors.at(ghost.item_index).hex();
    out += "<rect class=\"ghost\" data-item=\"" + escape(ghost.item_id) + "\" x=\"" + num(g.x) +
           "\" y=\"" + num(g.y) + "\" width=\"" + num(g.width) + "\" height=\"" +
           num(g.height) + "\" fill=\"" + color + "\" fill-opacity=\"" +
           num(kGhostFillOpacity) + "\" stroke=\"" + color +
           "\" stroke-width=\"1.5\" stroke-dasharray=\"" + std::string(kGhostDash) + "\"/>\n";
    out += "<text class=\"ghost-label\" data-item=\"" + escape(ghost.item_id) + "\" x=\"" +
           num(g.x + g.width + 4.0) + "\" y=\"" + num(g.y + g.height / 2.0 + font * 0.35) +
           "\" font-size=\"" + num(font) + "\" fill=\"" + color + "\">" + num(ghost.value) +
           " (#" + std::to_string(ghost.rank) + ")</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

/// Full pipeline for frame `k`: resolve overlays from `specs`, then render.
inline std::string render_timeline_frame(const KeyframeTimeline& timeline,
                                         const std::vector<ForeshadowSpec>& specs,
                                         const CanvasSpec& canvas, std::size_t k) {
  const auto& frame = timeline.frames.at(k);
  return render_frame(frame, resolve_styles(specs, frame, timeline), canvas, timeline);
}

}  // namespace foreshadow
