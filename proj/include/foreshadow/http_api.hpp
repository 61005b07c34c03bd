#pragma once

// HTTP + JSON authoring API over a SceneStore.
//
//   POST   /scenes                      CSV as multipart field "file" (or raw body)
//   GET    /scenes/{id}
//   PATCH  /scenes/{id}/settings        {expected_revision, settings?, canvas?}
//   PATCH  /scenes/{id}/cells           {expected_revision, item_id, period, value}
//   POST   /scenes/{id}/specs           {expected_revision, spec}
//   PUT    /scenes/{id}/specs/{sid}     {expected_revision, spec}
//   DELETE /scenes/{id}/specs/{sid}?expected_revision=N
//   GET    /scenes/{id}/frames/{n}      image/svg+xml
//   GET    /scenes/{id}/events?top_n=&jump=
//   POST   /scenes/{id}/export          {out_dir}
//
// The expected revision may also be sent as an `If-Match` header. Errors
// answer with {code, message, violations[]}.

#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "foreshadow/dataset.hpp"
#include "foreshadow/events.hpp"
#include "foreshadow/json_io.hpp"
#include "foreshadow/scene.hpp"

namespace foreshadow::http {

inline Json error_body(std::string_view code, const std::string& message,
                       const std::vector<Violation>& violations = {}) {
  return {{"code", code}, {"message", message}, {"violations", to_json(violations)}};
}

inline int status_for(SceneErrorCode c) {
  switch (c) {
    case SceneErrorCode::UnknownScene:
    case SceneErrorCode::UnknownSpec:
    case SceneErrorCode::FrameOutOfRange: return 404;
    case SceneErrorCode::RevisionConflict: return 409;
    case SceneErrorCode::ValidationFailed:
    case SceneErrorCode::InvalidSettings: return 422;
    case SceneErrorCode::BadRequest: return 400;
    case SceneErrorCode::IoFailure: return 500;
  }
  return 500;
}

/// Scene document plus values the studio derives its timeline from.
inline Json scene_view(const CompiledScene& c) {
  Json j = to_json(c.scene);
  const auto manifest = build_manifest(c.timeline, c.scene.specs, c.scene.canvas);
  j["derived"] = {{"frame_count", manifest.frame_count},
                  {"duration_s", manifest.duration_s},
                  {"period_boundaries_s", manifest.period_boundaries_s},
                  {"intervals", to_json(manifest.foreshadow_intervals)}};
  return j;
}

namespace detail {

inline void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("request body is not JSON: ") + e.what());
  }
}

inline std::int64_t expected_revision(const httplib::Request& req, const Json* body) {
  if (body && body->is_object() && body->contains("expected_revision")) {
    return json_detail::get<std::int64_t>(*body, "expected_revision");
  }
  std::string text;
  if (req.has_param("expected_revision")) {
    text = req.get_param_value("expected_revision");
  } else if (req.has_header("If-Match")) {
    text = req.get_header_value("If-Match");
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
      text = text.substr(1, text.size() - 2);
    }
  } else {
    throw SceneError(SceneErrorCode::BadRequest, "expected_revision is required");
  }
  try {
    std::size_t used = 0;
    const auto rev = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return rev;
  } catch (const std::exception&) {
    throw SceneError(SceneErrorCode::BadRequest, "bad revision '" + text + "'");
  }
}

inline int int_param(const httplib::Request& req, const char* name, int fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw SceneError(SceneErrorCode::BadRequest,
                     std::string(name) + " must be a positive integer");
  }
}

// Runs `handler`, translating domain errors into error bodies.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const SceneError& e) {
      send_json(res, error_body(to_string(e.code()), e.what(), e.violations()),
                status_for(e.code()));
    } catch (const ForeshadowError& e) {
      send_json(res, error_body("ValidationFailed", e.what(), e.violations()), 422);
    } catch (const DataError& e) {
      send_json(res, error_body(to_string(e.code()), e.what()), 400);
    } catch (const SchemaError& e) {
      send_json(res, error_body("BadRequest", e.what()), 400);
    } catch (const RenderError& e) {
      send_json(res, error_body(to_string(e.code()), e.what()),
                e.code() == RenderErrorCode::IoFailure ? 500 : 422);
    } catch (const nlohmann::json::exception& e) {
      send_json(res, error_body("BadRequest", e.what()), 400);
    } catch (const std::exception& e) {
      send_json(res, error_body("Internal", e.what()), 500);
    }
  };
}

}  // namespace detail

/// Registers every route on `server`. `store` must outlive the server.
inline void register_routes(httplib::Server& server, SceneStore& store) {
  using detail::guarded;
  using detail::send_json;

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
    res.status = 204;
  });

  server.Post("/scenes", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    std::string csv = req.body;
    std::optional<AnimationSettings> settings;
    std::optional<CanvasSpec> canvas;
    if (req.is_multipart_form_data()) {
      if (req.has_file("file")) {
        csv = req.get_file_value("file").content;
      } else if (req.has_file("csv")) {
        csv = req.get_file_value("csv").content;
      } else {
        throw SceneError(SceneErrorCode::BadRequest, "multipart field 'file' is required");
      }
      if (req.has_file("settings")) {
        settings = settings_from_json(Json::parse(req.get_file_value("settings").content));
      }
      if (req.has_file("canvas")) {
        canvas = canvas_from_json(Json::parse(req.get_file_value("canvas").content));
      }
    }
    const auto scene = store.create_scene(csv, settings, canvas);
    send_json(res, scene_view(*store.snapshot(scene.id)), 201);
  }));

  server.Get(R"(/scenes/([^/]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, scene_view(*store.snapshot(req.matches[1])));
             }));

  server.Patch(R"(/scenes/([^/]+)/settings)",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                 const auto body = detail::parse_body(req);
                 const auto rev = detail::expected_revision(req, &body);
                 const std::string id = req.matches[1];
                 const auto current = store.get_scene(id);
                 const auto settings = body.contains("settings")
                                           ? settings_from_json(body.at("settings"), current.settings)
                                           : current.settings;
                 std::optional<CanvasSpec> canvas;
                 if (body.contains("canvas")) canvas = canvas_from_json(body.at("canvas"), current.canvas);
                 const auto scene = store.update_settings(id, rev, settings, canvas);
                 send_json(res, scene_view(*store.snapshot(scene.id)));
               }));

  server.Patch(R"(/scenes/([^/]+)/cells)",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                 const auto body = detail::parse_body(req);
                 const auto rev = detail::expected_revision(req, &body);
                 using json_detail::get;
                 const auto scene =
                     store.edit_cell(req.matches[1], rev, get<std::string>(body, "item_id"),
                                     get<std::string>(body, "period"), get<double>(body, "value"));
                 send_json(res, scene_view(*store.snapshot(scene.id)));
               }));

  server.Post(R"(/scenes/([^/]+)/specs)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const auto body = detail::parse_body(req);
                const auto rev = detail::expected_revision(req, &body);
                auto spec = spec_from_json(json_detail::require(body, "spec"));
                const auto scene = store.add_spec(req.matches[1], rev, std::move(spec));
                send_json(res, scene_view(*store.snapshot(scene.id)), 201);
              }));

  server.Put(R"(/scenes/([^/]+)/specs/([^/]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const auto body = detail::parse_body(req);
               const auto rev = detail::expected_revision(req, &body);
               auto spec = spec_from_json(json_detail::require(body, "spec"));
               const auto scene = store.update_spec(req.matches[1], rev, req.matches[2], std::move(spec));
               send_json(res, scene_view(*store.snapshot(scene.id)));
             }));

  server.Delete(R"(/scenes/([^/]+)/specs/([^/]+))",
                guarded([&store](const httplib::Request& req, httplib::Response& res) {
                  std::optional<Json> body;
                  if (!req.body.empty()) body = detail::parse_body(req);
                  const auto rev = detail::expected_revision(req, body ? &*body : nullptr);
                  const auto scene = store.delete_spec(req.matches[1], rev, req.matches[2]);
                  send_json(res, scene_view(*store.snapshot(scene.id)));
                }));

  server.Get(R"(/scenes/([^/]+)/frames/(\d+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               std::size_t frame = 0;
               try {
                 frame = std::stoull(req.matches[2]);
               } catch (const std::exception&) {
                 throw SceneError(SceneErrorCode::FrameOutOfRange, "frame index too large");
               }
               res.set_content(store.preview(req.matches[1], frame), "image/svg+xml");
             }));

  server.Get(R"(/scenes/([^/]+)/events)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto snap = store.snapshot(id);
               const int top_n = detail::int_param(req, "top_n", snap->scene.settings.top_n);
               const int jump = detail::int_param(req, "jump", kDefaultJumpThreshold);
               Json out = Json::array();
               for (const auto& e : detect_events(snap->scene.dataset, top_n, jump)) {
                 out.push_back(to_json(e));
               }
               send_json(res, out);
             }));

  server.Post(R"(/scenes/([^/]+)/export)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const auto body = detail::parse_body(req);
                const auto out_dir = json_detail::get<std::string>(body, "out_dir");
                send_json(res, to_json(store.export_scene(req.matches[1], out_dir)));
              }));
}

}  // namespace foreshadow::http
