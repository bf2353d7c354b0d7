#pragma once

#include <memory>
#include <string>
#include <thread>

#include "magaisil/service/hub.hpp"

namespace httplib {
class Server;
}

namespace magaisil::service {

// HTTP/JSON front end over a SessionHub:
//   GET  /api/status, /api/task, /api/pending, /api/metrics?after=N
//   POST /api/judgment {trajectory_id, accept}   409 when unknown or decided
//   GET  /api/events   server-sent events (episode, replacement, pending, status)
// Static files under `ui_dir`, when given, are served from /.
class ApiServer {
 public:
  explicit ApiServer(SessionHub& hub, std::string ui_dir = "");
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks a free
  // port. Returns the bound port; throws IoError when binding fails.
  int start(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  SessionHub& hub_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace magaisil::service
