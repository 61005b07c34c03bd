#pragma once

// Writes an animation as numbered SVG frames plus an `animation.json`
// manifest. Layout of `out_dir` after a successful export:
//
//   frame_00000.svg ... frame_NNNNN.svg
//   animation.json
//
// Manifest schema (keys are emitted in sorted order):
//   format               "foreshadow-animation/1"
//   fps                  integer frames per second
//   frame_count          number of frame files
//   frames               frame file names in playback order
//   seconds_per_period   seconds between consecutive periods
//   duration_s           time of the last frame
//   periods              period labels in file order
//   period_boundaries_s  time of each period's boundary frame
//   period_boundary_frames  frame index of each period's boundary frame
//   foreshadow_intervals [{spec_id, start_s, end_s, target_period_s}], sorted
//                        by start_s then spec_id; a spec is active for
//                        start_s <= t < end_s
//   width, height        canvas size in px

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "foreshadow/effects.hpp"
#include "foreshadow/json_io.hpp"
#include "foreshadow/svg_renderer.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

inline constexpr std::string_view kManifestName = "animation.json";
inline constexpr std::string_view kManifestFormat = "foreshadow-animation/1";

inline std::string frame_file_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.svg", k);
  return buf;
}

struct Manifest {
  int fps = 0;
  std::size_t frame_count = 0;
  std::vector<std::string> frames;
  double seconds_per_period = 0.0;
  double duration_s = 0.0;
  std::vector<std::string> periods;
  std::vector<double> period_boundaries_s;
  std::vector<std::size_t> period_boundary_frames;
  std::vector<ActiveInterval> foreshadow_intervals;
  int width = 0;
  int height = 0;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline Manifest build_manifest(const KeyframeTimeline& timeline,
                               const std::vector<ForeshadowSpec>& specs,
                               const CanvasSpec& canvas) {
  Manifest m;
  m.fps = timeline.settings.fps;
  m.frame_count = timeline.frame_count();
  for (std::size_t k = 0; k < m.frame_count; ++k) m.frames.push_back(frame_file_name(k));
  m.seconds_per_period = timeline.settings.seconds_per_period;
  m.duration_s = timeline.frames.back().time_s;
  m.periods = timeline.periods;
  for (auto b : timeline.period_boundaries) {
    m.period_boundaries_s.push_back(timeline.frames[b].time_s);
    m.period_boundary_frames.push_back(b);
  }
  m.foreshadow_intervals = active_intervals(specs, timeline.settings);
  m.width = canvas.width;
  m.height = canvas.height;
  return m;
}

inline Json to_json(const Manifest& m) {
  return {{"format", kManifestFormat},
          {"fps", m.fps},
          {"frame_count", m.frame_count},
          {"frames", m.frames},
          {"seconds_per_period", m.seconds_per_period},
          {"duration_s", m.duration_s},
          {"periods", m.periods},
          {"period_boundaries_s", m.period_boundaries_s},
          {"period_boundary_frames", m.period_boundary_frames},
          {"foreshadow_intervals", to_json(m.foreshadow_intervals)},
          {"width", m.width},
          {"height", m.height}};
}

inline Manifest manifest_from_json(const Json& j) {
  using namespace json_detail;
  Manifest m;
  m.fps = get<int>(j, "fps");
  m.frame_count = get<std::size_t>(j, "frame_count");
  m.frames = get<std::vector<std::string>>(j, "frames");
  m.seconds_per_period = get<double>(j, "seconds_per_period");
  m.duration_s = get<double>(j, "duration_s");
  m.periods = get<std::vector<std::string>>(j, "periods");
  m.period_boundaries_s = get<std::vector<double>>(j, "period_boundaries_s");
  m.period_boundary_frames = get<std::vector<std::size_t>>(j, "period_boundary_frames");
  for (const auto& i : require(j, "foreshadow_intervals")) {
    m.foreshadow_intervals.push_back({get<std::string>(i, "spec_id"), get<double>(i, "start_s"),
                                      get<double>(i, "end_s"),
                                      get<double>(i, "target_period_s")});
  }
  m.width = get<int>(j, "width");
  m.height = get<int>(j, "height");
  return m;
}

namespace export_detail {

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RenderError(RenderErrorCode::IoFailure, "cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw RenderError(RenderErrorCode::IoFailure, "cannot write " + path.string());
}

// Frame files and manifest left by an earlier export into the same directory.
inline void remove_previous_export(const std::filesystem::path& dir) {
  static const std::regex frame_re(R"(frame_\d{5}\.svg)");
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() &&
        (name == kManifestName || std::regex_match(name, frame_re))) {
      std::filesystem::remove(entry.path(), ec);
    }
  }
}

}  // namespace export_detail

/// Renders every frame into `out_dir` and writes the manifest last, only
/// after all frames succeeded. Specs must validate against the timeline.
inline Manifest export_animation(const KeyframeTimeline& timeline,
                                 const std::vector<ForeshadowSpec>& specs,
                                 const CanvasSpec& canvas,
                                 const std::filesystem::path& out_dir,
                                 unsigned threads = std::thread::hardware_concurrency()) {
  auto violations = validate_specs(specs, SpecContext::of(timeline));
  if (!violations.empty()) throw ForeshadowError(std::move(violations));
  check_canvas(canvas);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw RenderError(RenderErrorCode::IoFailure, "cannot create " + out_dir.string());
  }
  export_detail::remove_previous_export(out_dir);

  const std::size_t n = timeline.frame_count();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < n; k += workers) {
            export_detail::write_file(out_dir / frame_file_name(k),
                                      render_timeline_frame(timeline, specs, canvas, k));
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);

  auto manifest = build_manifest(timeline, specs, canvas);
  export_detail::write_file(out_dir / kManifestName, to_json(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace foreshadow
