#pragma once

#include <memory>
#include <string>
#include <thread>

#include "httplib.h"

#include "foreshadow/http_api.hpp"
#include "foreshadow/scene.hpp"

namespace foreshadow::testing {

/// API server on an ephemeral localhost port for the lifetime of the object.
class ApiServer {
 public:
  explicit ApiServer(SceneStore& store) {
    http::register_routes(server_, store);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ApiServer() {
    server_.stop();
    thread_.join();
  }
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  int port() const { return port_; }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace foreshadow::testing
