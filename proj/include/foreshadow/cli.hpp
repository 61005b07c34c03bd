#pragma once

// Batch command line: render, detect, validate and serve.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 validation failure.
// Data goes to `out`, diagnostics to `err`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"

#include "foreshadow/dataset.hpp"
#include "foreshadow/events.hpp"
#include "foreshadow/export.hpp"
#include "foreshadow/http_api.hpp"
#include "foreshadow/json_io.hpp"
#include "foreshadow/scene.hpp"

namespace foreshadow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void print_violations(const std::vector<Violation>& vs, std::ostream& out) {
  for (const auto& v : vs) {
    out << to_string(v.code) << '\t' << v.spec_id << '\t' << v.message << '\n';
  }
}

}  // namespace detail

struct RenderOptions {
  std::string data;
  std::string scene;
  std::string out;
  std::optional<int> fps;
  std::optional<double> seconds_per_period;
  std::optional<int> top_n;
  std::optional<std::string> easing;
};

/// Loads the scene file, takes the dataset from `data` when given and applies
/// flag overrides on top of the scene's settings.
inline Scene load_scene(const RenderOptions& o) {
  std::optional<RankingDataset> ds;
  if (!o.data.empty()) ds = parse_dataset(detail::read_file(o.data));
  Scene s;
  if (!o.scene.empty()) {
    s = parse_scene(detail::read_file(o.scene), ds ? &*ds : nullptr);
  } else if (ds) {
    s.dataset = *ds;
  } else {
    throw SchemaError("either --data or --scene is required");
  }
  if (o.fps) s.settings.fps = *o.fps;
  if (o.seconds_per_period) s.settings.seconds_per_period = *o.seconds_per_period;
  if (o.top_n) s.settings.top_n = *o.top_n;
  if (o.easing) s.settings.easing = easing_from_string(*o.easing);
  return s;
}

// Checks the scene; prints violations and returns kExitInvalid on failure.
inline std::optional<int> check_or_report(const Scene& s, std::ostream& out, std::ostream& err) {
  try {
    const auto violations = check_scene(s);
    if (!violations.empty()) {
      detail::print_violations(violations, out);
      err << "validation failed: " << violations.size() << " violation(s)\n";
      return kExitInvalid;
    }
  } catch (const SceneError& e) {
    out << to_string(e.code()) << "\t\t" << e.what() << '\n';
    err << "validation failed: " << e.what() << '\n';
    return kExitInvalid;
  }
  return std::nullopt;
}

inline int run_render(const RenderOptions& o, std::ostream& out, std::ostream& err) {
  const auto scene = load_scene(o);
  if (auto code = check_or_report(scene, out, err)) return *code;
  const auto timeline = compile_timeline(scene.dataset, scene.settings);
  const auto manifest = export_animation(timeline, scene.specs, scene.canvas, o.out);
  err << "wrote " << manifest.frame_count << " frames to " << o.out << '\n';
  return kExitOk;
}

inline int run_validate(const RenderOptions& o, std::ostream& out, std::ostream& err) {
  const auto scene = load_scene(o);
  if (auto code = check_or_report(scene, out, err)) return *code;
  err << "ok\n";
  return kExitOk;
}

inline int run_detect(const std::string& data, int top_n, int jump, std::ostream& out) {
  const auto ds = parse_dataset(detail::read_file(data));
  for (const auto& e : detect_events(ds, top_n, jump)) out << to_json(e).dump() << '\n';
  return kExitOk;
}

inline int run_serve(const std::string& host, int port, const std::string& store_dir,
                     const std::string& ui_dir, std::ostream& err) {
  auto store = store_dir.empty() ? std::make_unique<SceneStore>()
                                 : std::make_unique<SceneStore>(store_dir);
  httplib::Server server;
  http::register_routes(server, *store);
  if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir)) {
    err << "cannot serve UI from " << ui_dir << '\n';
    return kExitFailure;
  }
  err << "listening on http://" << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    err << "cannot listen on " << host << ':' << port << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Bar chart race compiler with visual foreshadowing"};
  app.require_subcommand(1);

  RenderOptions ro;
  auto* render = app.add_subcommand("render", "Export SVG frames and animation.json");
  render->add_option("--data", ro.data, "CSV dataset (overrides the scene's dataset)");
  render->add_option("--scene", ro.scene, "Scene file (JSON)");
  render->add_option("--out", ro.out, "Output directory")->required();
  render->add_option("--fps", ro.fps, "Frames per second")->check(CLI::PositiveNumber);
  render->add_option("--seconds-per-period", ro.seconds_per_period, "Seconds per period")
      ->check(CLI::PositiveNumber);
  render->add_option("--top-n", ro.top_n, "Visible bar slots")->check(CLI::PositiveNumber);
  render->add_option("--easing", ro.easing, "linear | cubic_in_out");

  RenderOptions vo;
  auto* validate = app.add_subcommand("validate", "Check a scene without rendering");
  validate->add_option("--data", vo.data, "CSV dataset");
  validate->add_option("--scene", vo.scene, "Scene file (JSON)");

  std::string detect_data;
  int detect_top_n = AnimationSettings{}.top_n;
  int detect_jump = kDefaultJumpThreshold;
  auto* detect = app.add_subcommand("detect", "Print ranking events as JSON lines");
  detect->add_option("--data", detect_data, "CSV dataset")->required();
  detect->add_option("--top-n", detect_top_n, "Top-N boundary")->check(CLI::PositiveNumber);
  detect->add_option("--jump", detect_jump, "Rank-jump threshold")->check(CLI::PositiveNumber);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store_dir;
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the authoring HTTP API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--store", store_dir, "Directory for scene documents (in-memory if omitted)");
  serve->add_option("--ui", ui_dir, "Static files to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (render->parsed()) return run_render(ro, out, err);
    if (validate->parsed()) return run_validate(vo, out, err);
    if (detect->parsed()) return run_detect(detect_data, detect_top_n, detect_jump, out);
    if (serve->parsed()) return run_serve(host, port, store_dir, ui_dir, err);
  } catch (const ForeshadowError& e) {
    detail::print_violations(e.violations(), out);
    err << e.what() << '\n';
    return kExitInvalid;
  } catch (const TimelineError& e) {
    err << e.what() << '\n';
    return e.code() == TimelineErrorCode::InvalidSettings ? kExitInvalid : kExitFailure;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace foreshadow::cli
