#pragma once

// Scene documents and the scene store behind the authoring API.
//
// A scene is self-contained: dataset, animation settings, canvas and
// foreshadow specs. Every mutation names the revision it was based on and is
// rejected with RevisionConflict when the scene has moved on. Mutations of
// one scene are serialized; reads and previews run concurrently.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foreshadow/dataset.hpp"
#include "foreshadow/effects.hpp"
#include "foreshadow/events.hpp"
#include "foreshadow/export.hpp"
#include "foreshadow/json_io.hpp"
#include "foreshadow/svg_renderer.hpp"
#include "foreshadow/timeline.hpp"

namespace foreshadow {

inline constexpr std::string_view kSceneFormat = "foreshadow-scene/1";

struct Scene {
  std::string id;
  RankingDataset dataset;
  AnimationSettings settings;
  CanvasSpec canvas;
  std::vector<ForeshadowSpec> specs;
  std::int64_t revision = 0;

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class SceneErrorCode {
  UnknownScene,
  UnknownSpec,
  RevisionConflict,
  ValidationFailed,
  InvalidSettings,
  FrameOutOfRange,
  BadRequest,
  IoFailure,
};

inline std::string_view to_string(SceneErrorCode c) {
  switch (c) {
    case SceneErrorCode::UnknownScene: return "UnknownScene";
    case SceneErrorCode::UnknownSpec: return "UnknownSpec";
    case SceneErrorCode::RevisionConflict: return "RevisionConflict";
    case SceneErrorCode::ValidationFailed: return "ValidationFailed";
    case SceneErrorCode::InvalidSettings: return "InvalidSettings";
    case SceneErrorCode::FrameOutOfRange: return "FrameOutOfRange";
    case SceneErrorCode::BadRequest: return "BadRequest";
    case SceneErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrorCode code, const std::string& message,
             std::vector<Violation> violations = {})
      : std::runtime_error(message), code_(code), violations_(std::move(violations)) {}

  SceneErrorCode code() const noexcept { return code_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  SceneErrorCode code_;
  std::vector<Violation> violations_;
};

// --- document encoding ---------------------------------------------------------

inline Json to_json(const Scene& s) {
  return {{"format", kSceneFormat},
          {"id", s.id},
          {"revision", s.revision},
          {"dataset", to_json(s.dataset)},
          {"settings", to_json(s.settings)},
          {"canvas", to_json(s.canvas)},
          {"specs", to_json(s.specs)}};
}

/// Parses a scene document. `dataset` may be omitted when `fallback_dataset`
/// is given (CLI scene files that take their data from --data).
inline Scene scene_from_json(const Json& j, const RankingDataset* fallback_dataset = nullptr) {
  using namespace json_detail;
  if (!j.is_object()) throw SchemaError("scene document must be an object");
  if (j.contains("format") && get<std::string>(j, "format") != kSceneFormat) {
    throw SchemaError("unsupported scene format '" + get<std::string>(j, "format") + "'");
  }
  Scene s;
  s.id = get_or<std::string>(j, "id", "");
  s.revision = get_or<std::int64_t>(j, "revision", 0);
  if (fallback_dataset) {
    s.dataset = *fallback_dataset;
  } else {
    s.dataset = dataset_from_json(require(j, "dataset"));
  }
  if (j.contains("settings")) s.settings = settings_from_json(j.at("settings"));
  if (j.contains("canvas")) s.canvas = canvas_from_json(j.at("canvas"));
  if (j.contains("specs")) s.specs = specs_from_json(j.at("specs"));
  return s;
}

inline std::string serialize_scene(const Scene& s) { return to_json(s).dump(2) + "\n"; }

inline Scene parse_scene(std::string_view text, const RankingDataset* fallback_dataset = nullptr) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return scene_from_json(j, fallback_dataset);
}

/// Settings, canvas and specs checks. Settings and canvas problems raise
/// InvalidSettings; spec problems are returned.
inline std::vector<Violation> check_scene(const Scene& s) {
  try {
    check_settings(s.settings);
    check_canvas(s.canvas);
  } catch (const TimelineError& e) {
    throw SceneError(SceneErrorCode::InvalidSettings, e.what());
  } catch (const RenderError& e) {
    throw SceneError(SceneErrorCode::InvalidSettings, e.what());
  }
  return validate_specs(s.specs, SpecContext::of(s.dataset));
}

inline void require_valid(const Scene& s) {
  auto v = check_scene(s);
  if (!v.empty()) {
    throw SceneError(SceneErrorCode::ValidationFailed,
                     "scene has " + std::to_string(v.size()) + " invalid spec field(s)",
                     std::move(v));
  }
}

/// Compiled scene: timeline plus what the renderer needs.
struct CompiledScene {
  Scene scene;
  KeyframeTimeline timeline;

  std::string render(std::size_t frame_index) const {
    if (frame_index >= timeline.frame_count()) {
      throw SceneError(SceneErrorCode::FrameOutOfRange,
                       "frame " + std::to_string(frame_index) + " outside [0, " +
                           std::to_string(timeline.frame_count()) + ")");
    }
    return render_timeline_frame(timeline, scene.specs, scene.canvas, frame_index);
  }

  Manifest export_to(const std::filesystem::path& out_dir) const {
    return export_animation(timeline, scene.specs, scene.canvas, out_dir);
  }
};

inline std::shared_ptr<const CompiledScene> compile_scene(Scene s) {
  require_valid(s);
  auto timeline = compile_timeline(s.dataset, s.settings);
  return std::make_shared<const CompiledScene>(CompiledScene{std::move(s), std::move(timeline)});
}

// --- store -------------------------------------------------------------------------

class SceneStore {
 public:
  /// In-memory store.
  SceneStore() = default;

  /// Store persisting one `<id>.json` document per scene under `root`;
  /// existing documents are loaded.
  explicit SceneStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(*root_, ec);
    if (!std::filesystem::is_directory(*root_)) {
      throw SceneError(SceneErrorCode::IoFailure, "cannot create " + root_->string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(*root_)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      auto compiled = compile_scene(parse_scene(buf.str()));
      auto e = std::make_shared<Entry>();
      e->current = compiled;
      scenes_.emplace(compiled->scene.id, std::move(e));
    }
  }

  Scene create_scene(std::string_view csv_text, std::optional<AnimationSettings> settings = {},
                     std::optional<CanvasSpec> canvas = {}) {
    Scene s;
    s.dataset = parse_dataset(csv_text);
    if (settings) s.settings = *settings;
    if (canvas) s.canvas = *canvas;
    s.revision = 1;

    std::unique_lock lock(map_mutex_);
    do {
      s.id = "scene-" + std::to_string(++next_id_);
    } while (scenes_.count(s.id));
    auto compiled = compile_scene(std::move(s));
    persist(compiled->scene);
    auto e = std::make_shared<Entry>();
    e->current = compiled;
    scenes_.emplace(compiled->scene.id, e);
    return compiled->scene;
  }

  Scene get_scene(const std::string& id) const { return snapshot(id)->scene; }

  std::shared_ptr<const CompiledScene> snapshot(const std::string& id) const {
    auto e = entry(id);
    std::shared_lock lock(e->mutex);
    return e->current;
  }

  std::vector<std::string> scene_ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : scenes_) ids.push_back(id);
    return ids;
  }

  Scene update_settings(const std::string& id, std::int64_t expected_revision,
                        const AnimationSettings& settings,
                        const std::optional<CanvasSpec>& canvas = {}) {
    return mutate(id, expected_revision, [&](Scene& s) {
      s.settings = settings;
      if (canvas) s.canvas = *canvas;
    });
  }

  Scene add_spec(const std::string& id, std::int64_t expected_revision, ForeshadowSpec spec) {
    return mutate(id, expected_revision, [&](Scene& s) { s.specs.push_back(std::move(spec)); });
  }

  Scene update_spec(const std::string& id, std::int64_t expected_revision,
                    const std::string& spec_id, ForeshadowSpec spec) {
    return mutate(id, expected_revision, [&](Scene& s) {
      auto& slot = find_spec(s, spec_id);
      if (spec.id.empty()) spec.id = spec_id;
      slot = std::move(spec);
    });
  }

  Scene delete_spec(const std::string& id, std::int64_t expected_revision,
                    const std::string& spec_id) {
    return mutate(id, expected_revision, [&](Scene& s) {
      auto& slot = find_spec(s, spec_id);
      s.specs.erase(s.specs.begin() + (&slot - s.specs.data()));
    });
  }

  Scene edit_cell(const std::string& id, std::int64_t expected_revision,
                  const std::string& item_id, const std::string& period_label, double value) {
    return mutate(id, expected_revision, [&](Scene& s) {
      try {
        s.dataset = foreshadow::edit_cell(s.dataset, item_id, period_label, value);
      } catch (const DataError& e) {
        throw SceneError(SceneErrorCode::BadRequest, e.what());
      }
    });
  }

  std::string preview(const std::string& id, std::size_t frame_index) const {
    return snapshot(id)->render(frame_index);
  }

  std::vector<KeyEvent> events(const std::string& id, int top_n, int jump_threshold) const {
    return detect_events(snapshot(id)->scene.dataset, top_n, jump_threshold);
  }

  Manifest export_scene(const std::string& id, const std::filesystem::path& out_dir) const {
    return snapshot(id)->export_to(out_dir);
  }

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    std::shared_ptr<const CompiledScene> current;
  };

  std::shared_ptr<Entry> entry(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    auto it = scenes_.find(id);
    if (it == scenes_.end()) {
      throw SceneError(SceneErrorCode::UnknownScene, "no scene '" + id + "'");
    }
    return it->second;
  }

  static ForeshadowSpec& find_spec(Scene& s, const std::string& spec_id) {
    for (auto& spec : s.specs) {
      if (spec.id == spec_id) return spec;
    }
    throw SceneError(SceneErrorCode::UnknownSpec, "no spec '" + spec_id + "' in scene " + s.id);
  }

  // Applies `change` to a copy; the stored scene is replaced only when the
  // result validates, compiles and has been persisted.
  template <typename Change>
  Scene mutate(const std::string& id, std::int64_t expected_revision, Change&& change) {
    auto e = entry(id);
    std::unique_lock lock(e->mutex);
    const auto& current = e->current->scene;
    if (current.revision != expected_revision) {
      throw SceneError(SceneErrorCode::RevisionConflict,
                       "scene " + id + " is at revision " + std::to_string(current.revision) +
                           ", request was based on " + std::to_string(expected_revision));
    }
    Scene next = current;
    change(next);
    next.revision = current.revision + 1;
    auto compiled = compile_scene(std::move(next));
    persist(compiled->scene);
    e->current = compiled;
    return compiled->scene;
  }

  void persist(const Scene& s) const {
    if (!root_) return;
    const auto path = *root_ / (s.id + ".json");
    const auto tmp = *root_ / (s.id + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      const auto bytes = serialize_scene(s);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw SceneError(SceneErrorCode::IoFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw SceneError(SceneErrorCode::IoFailure, "cannot replace " + path.string());
  }

  std::optional<std::filesystem::path> root_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> scenes_;
  std::size_t next_id_ = 0;
};

}  // namespace foreshadow
