#include "magaisil/service/api.hpp"

#include <filesystem>

#include <httplib.h>

#include "magaisil/common/error.hpp"

namespace magaisil::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string sse_message(const HubEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + e.data + "\n\n";
}

}  // namespace

ApiServer::ApiServer(SessionHub& hub, std::string ui_dir)
    : hub_(hub), server_(std::make_unique<httplib::Server>()) {
  httplib::Server& svr = *server_;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  svr.Get("/api/status", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, hub_.status());
  });
  svr.Get("/api/task", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, hub_.task());
  });
  svr.Get("/api/pending", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const PendingJudgment& p : hub_.pending()) out.push_back(to_json(p));
    send_json(res, out);
  });
  svr.Get("/api/metrics", [this](const httplib::Request& req, httplib::Response& res) {
    int after = -1;
    if (req.has_param("after")) {
      try {
        after = std::stoi(req.get_param_value("after"));
      } catch (const std::exception&) {
        send_json(res, {{"error", "after must be an integer"}}, 400);
        return;
      }
    }
    send_json(res, hub_.metrics_after(after));
  });
  svr.Post("/api/judgment", [this](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("trajectory_id") ||
        !body["trajectory_id"].is_string() || !body.contains("accept") || !body["accept"].is_boolean()) {
      send_json(res, {{"error", "expected {\"trajectory_id\": string, \"accept\": bool}"}}, 400);
      return;
    }
    const std::string id = body["trajectory_id"].get<std::string>();
    const bool accept = body["accept"].get<bool>();
    switch (hub_.submit(id, accept)) {
      case SessionHub::Submit::Recorded:
        send_json(res, {{"trajectory_id", id}, {"accept", accept}, {"recorded", true}});
        break;
      case SessionHub::Submit::Unknown:
        send_json(res, {{"error", "unknown trajectory"}, {"trajectory_id", id}}, 409);
        break;
      case SessionHub::Submit::AlreadyDecided:
        send_json(res,
                  {{"error", "already decided"},
                   {"trajectory_id", id},
                   {"accept", hub_.decision_for(id).value_or(false)}},
                  409);
        break;
    }
  });
  svr.Get("/api/events", [this](const httplib::Request& req, httplib::Response& res) {
    auto cursor = std::make_shared<std::uint64_t>(0);
    try {
      if (req.has_param("after")) {
        *cursor = std::stoull(req.get_param_value("after"));
      } else if (req.has_header("Last-Event-ID")) {
        *cursor = std::stoull(req.get_header_value("Last-Event-ID"));
      }
    } catch (const std::exception&) {
      send_json(res, {{"error", "bad event cursor"}}, 400);
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
      const std::vector<HubEvent> events = hub_.events_after(*cursor, std::chrono::milliseconds(1000));
      if (events.empty()) {
        if (hub_.closed()) {
          sink.done();
          return true;
        }
        static const std::string ping = ": ping\n\n";
        return sink.write(ping.data(), ping.size());
      }
      for (const HubEvent& e : events) {
        const std::string msg = sse_message(e);
        if (!sink.write(msg.data(), msg.size())) return false;
        *cursor = e.seq;
      }
      return true;
    });
  });

  if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir)) svr.set_mount_point("/", ui_dir);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ < 0) throw IoError("cannot bind " + host);
  } else {
    if (!server_->bind_to_port(host, port)) {
      throw IoError("cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ApiServer::stop() {
  hub_.close();  // lets open event streams finish
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace magaisil::service
