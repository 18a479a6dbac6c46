#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qrw/json.hpp"
#include "qrw/session.hpp"

namespace httplib {
class Server;
}

namespace qrw {

struct ServerOptions {
  std::chrono::seconds idleTimeout{1800};
  /// Directory served under /ui when non-empty.
  std::string uiDir;
};

/// JSON session API over cpp-httplib. Requests on different sessions run
/// concurrently; requests on one session are serialized by its mutex. The
/// registry is shared read-only.
class SessionServer {
 public:
  struct Response {
    int status = 200;
    Json body;
  };
  struct Request {
    std::map<std::string, std::string> params;  // path captures
    std::string body;
  };
  struct Route {
    std::string method;
    std::string path;  // OpenAPI form, e.g. /sessions/{id}/moves
    std::string summary;
    std::function<Response(SessionServer&, const Request&)> handler;
  };

  SessionServer(std::shared_ptr<const Registry> registry,
                NormalizeConfig config, ServerOptions options = {});
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  static const std::vector<Route>& routes();
  Json openapi() const;

  /// Binds and serves until stop(). Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port, serves on a background thread and returns the
  /// port (or -1).
  int start(const std::string& host = "127.0.0.1");
  void stop();

  std::size_t sessionCount();

 private:
  struct Record;
  friend struct Handlers;

  void install(httplib::Server& server);
  std::shared_ptr<Record> find(const std::string& id);
  std::pair<std::string, std::shared_ptr<Record>> create(Term initial);
  void expireIdle();

  std::shared_ptr<const Registry> registry_;
  NormalizeConfig config_;
  ServerOptions options_;

  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Record>> sessions_;
  std::uint64_t next_id_ = 1;

  std::unique_ptr<httplib::Server> http_;
  std::unique_ptr<std::thread> thread_;
};

}  // namespace qrw
