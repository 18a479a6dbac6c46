#include "qrw/server.hpp"

#include <httplib.h>

#include <iomanip>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

namespace qrw {

struct SessionServer::Record {
  explicit Record(Session s) : session(std::move(s)) {}

  std::mutex mutex;
  Session session;
  std::chrono::system_clock::time_point created = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point touched = std::chrono::steady_clock::now();
  // Bumped on every mutation; clients echo it back when applying by index.
  std::uint64_t version = 1;
};

namespace {

using Response = SessionServer::Response;
using Request = SessionServer::Request;

Response errorResponse(int status, const Json& error) {
  return {status, {{"error", error}}};
}

Response errorResponse(int status, const std::string& kind,
                       const std::string& message) {
  return errorResponse(status, {{"kind", kind}, {"message", message}});
}

Response unknownSession(const Request& r) {
  return errorResponse(404, "UnknownSession",
                       "no session " + r.params.at("id"));
}

Json parseBody(const Request& r) {
  if (r.body.empty()) return Json::object();
  Json j = Json::parse(r.body);  // throws json::parse_error
  if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
  return j;
}

}  // namespace

struct Handlers {
  using Rec = std::shared_ptr<SessionServer::Record>;

  static Json state(const std::string& id, const SessionServer::Record& rec) {
    Json j = termStateToJson(rec.session.current());
    j["sessionId"] = id;
    j["stepCount"] = rec.session.stepCount();
    j["version"] = rec.version;
    return j;
  }

  static Response create(SessionServer& s, const Request& r) {
    const Json body = parseBody(r);
    if (!body.contains("term") || !body["term"].is_string()) {
      return errorResponse(400, "BadRequest", "body needs a \"term\" string");
    }
    try {
      Term t = parseTerm(body["term"].get<std::string>());
      auto [id, rec] = s.create(t);
      std::lock_guard lock(rec->mutex);
      return {201, state(id, *rec)};
    } catch (const ParseError& e) {
      return errorResponse(400, errorToJson(e));
    } catch (const SortError& e) {
      return errorResponse(400, errorToJson(e));
    }
  }

  template <class F>
  static Response withSession(SessionServer& s, const Request& r, F&& f) {
    Rec rec = s.find(r.params.at("id"));
    if (!rec) return unknownSession(r);
    std::lock_guard lock(rec->mutex);
    rec->touched = std::chrono::steady_clock::now();
    return f(*rec);
  }

  static Response get(SessionServer& s, const Request& r) {
    return withSession(s, r, [&](SessionServer::Record& rec) {
      return Response{200, state(r.params.at("id"), rec)};
    });
  }

  static Response moves(SessionServer& s, const Request& r) {
    return withSession(s, r, [&](SessionServer::Record& rec) {
      Json list = Json::array();
      const auto steps = rec.session.moves();
      for (std::size_t i = 0; i < steps.size(); ++i) {
        Json m = stepToJson(steps[i]);
        m["index"] = i;
        m["preview"] = renderDirac(
            applyRule(rec.session.current(), steps[i], rec.session.registry()));
        list.push_back(std::move(m));
      }
      return Response{200, {{"version", rec.version}, {"moves", list}}};
    });
  }

  static Response apply(SessionServer& s, const Request& r) {
    const Json body = parseBody(r);
    return withSession(s, r, [&](SessionServer::Record& rec) {
      RewriteStep step;
      if (body.contains("index")) {
        if (!body.contains("version") || !body["version"].is_number_unsigned() ||
            body["version"].get<std::uint64_t>() != rec.version) {
          return errorResponse(409, "StaleMoves",
                               "moves list changed; fetch moves again");
        }
        const auto steps = rec.session.moves();
        if (!body["index"].is_number_unsigned() ||
            body["index"].get<std::size_t>() >= steps.size()) {
          return errorResponse(409, "StaleMoves", "move index out of range");
        }
        step = steps[body["index"].get<std::size_t>()];
      } else if (body.contains("ruleId")) {
        try {
          step = stepFromJson(body);
        } catch (const ParseError& e) {
          return errorResponse(400, errorToJson(e));
        }
      } else {
        return errorResponse(400, "BadRequest",
                             "body needs index and version, or ruleId");
      }
      try {
        rec.session.apply(step);
      } catch (const Error& e) {
        return errorResponse(422, errorToJson(e));
      }
      ++rec.version;
      Json j = state(r.params.at("id"), rec);
      j["applied"] = stepToJson(step);
      return Response{200, j};
    });
  }

  static Response undo(SessionServer& s, const Request& r) {
    return withSession(s, r, [&](SessionServer::Record& rec) {
      if (!rec.session.undo()) {
        return errorResponse(409, "NothingToUndo", "no step to undo");
      }
      ++rec.version;
      return Response{200, state(r.params.at("id"), rec)};
    });
  }

  static Response normalize(SessionServer& s, const Request& r) {
    return withSession(s, r, [&](SessionServer::Record& rec) {
      std::size_t added = 0;
      try {
        added = rec.session.normalize();
      } catch (const StepLimitExceeded& e) {
        return errorResponse(422, errorToJson(e));
      }
      if (added) ++rec.version;
      Json j = state(r.params.at("id"), rec);
      j["added"] = added;
      return Response{200, j};
    });
  }

  static Response derivation(SessionServer& s, const Request& r) {
    return withSession(s, r, [&](SessionServer::Record& rec) {
      return Response{200, derivationToJson(rec.session.derivation())};
    });
  }

  static Response remove(SessionServer& s, const Request& r) {
    std::lock_guard lock(s.sessions_mutex_);
    if (!s.sessions_.erase(r.params.at("id"))) return unknownSession(r);
    return {200, {{"deleted", r.params.at("id")}}};
  }

  static Response openapi(SessionServer& s, const Request&) {
    return {200, s.openapi()};
  }
};

const std::vector<SessionServer::Route>& SessionServer::routes() {
  static const std::vector<Route> table = {
      {"POST", "/sessions", "Start a session from a term", &Handlers::create},
      {"GET", "/sessions/{id}", "Current term of a session", &Handlers::get},
      {"DELETE", "/sessions/{id}", "Close a session", &Handlers::remove},
      {"GET", "/sessions/{id}/moves", "Applicable rewrite steps",
       &Handlers::moves},
      {"POST", "/sessions/{id}/apply", "Apply a move by index or explicit step",
       &Handlers::apply},
      {"POST", "/sessions/{id}/undo", "Undo the last step", &Handlers::undo},
      {"POST", "/sessions/{id}/normalize", "Normalize the current term",
       &Handlers::normalize},
      {"GET", "/sessions/{id}/derivation", "Derivation document so far",
       &Handlers::derivation},
      {"GET", "/openapi.json", "This document", &Handlers::openapi},
  };
  return table;
}

Json SessionServer::openapi() const {
  Json paths = Json::object();
  for (const Route& r : routes()) {
    std::string method = r.method;
    for (char& c : method) c = static_cast<char>(std::tolower(c));
    Json op{{"summary", r.summary},
            {"responses", {{"default", {{"description", "JSON body"}}}}}};
    if (r.path.find("{id}") != std::string::npos) {
      op["parameters"] = Json::array({{{"name", "id"},
                                       {"in", "path"},
                                       {"required", true},
                                       {"schema", {{"type", "string"}}}}});
    }
    paths[r.path][method] = std::move(op);
  }
  return {{"openapi", "3.0.3"},
          {"info", {{"title", "qrewrite session API"}, {"version", "1"}}},
          {"paths", paths}};
}

SessionServer::SessionServer(std::shared_ptr<const Registry> registry,
                             NormalizeConfig config, ServerOptions options)
    : registry_(std::move(registry)),
      config_(std::move(config)),
      options_(std::move(options)) {}

SessionServer::~SessionServer() { stop(); }

std::shared_ptr<SessionServer::Record> SessionServer::find(const std::string& id) {
  expireIdle();
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::pair<std::string, std::shared_ptr<SessionServer::Record>>
SessionServer::create(Term initial) {
  expireIdle();
  auto rec = std::make_shared<Record>(Session(std::move(initial), registry_, config_));
  static thread_local std::mt19937_64 rng(std::random_device{}());
  std::lock_guard lock(sessions_mutex_);
  std::ostringstream id;
  id << std::hex << std::setw(16) << std::setfill('0') << rng() << "-"
     << next_id_++;
  sessions_.emplace(id.str(), rec);
  return {id.str(), rec};
}

void SessionServer::expireIdle() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(sessions_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    // A session mid-request is locked; try_lock keeps it alive.
    std::unique_lock rec_lock(it->second->mutex, std::try_to_lock);
    if (rec_lock.owns_lock() && now - it->second->touched > options_.idleTimeout) {
      rec_lock.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::size_t SessionServer::sessionCount() {
  expireIdle();
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

void SessionServer::install(httplib::Server& server) {
  for (const Route& route : routes()) {
    const std::string pattern =
        std::regex_replace(route.path, std::regex(R"(\{id\})"), "([^/]+)");
    auto handler = [this, &route](const httplib::Request& req,
                                  httplib::Response& res) {
      Request r;
      r.body = req.body;
      if (req.matches.size() > 1) r.params["id"] = req.matches[1].str();
      Response out;
      try {
        out = route.handler(*this, r);
      } catch (const Json::exception& e) {
        out = errorResponse(400, "BadRequest", e.what());
      } catch (const std::invalid_argument& e) {
        out = errorResponse(400, "BadRequest", e.what());
      } catch (const Error& e) {
        out = errorResponse(500, errorToJson(e));
      } catch (const std::exception& e) {
        out = errorResponse(500, "InternalError", e.what());
      }
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    if (route.method == "GET") server.Get(pattern, handler);
    if (route.method == "POST") server.Post(pattern, handler);
    if (route.method == "DELETE") server.Delete(pattern, handler);
  }
  if (!options_.uiDir.empty()) server.set_mount_point("/ui", options_.uiDir);
}

bool SessionServer::listen(const std::string& host, int port) {
  http_ = std::make_unique<httplib::Server>();
  install(*http_);
  return http_->listen(host, port);
}

int SessionServer::start(const std::string& host) {
  http_ = std::make_unique<httplib::Server>();
  install(*http_);
  const int port = http_->bind_to_any_port(host);
  if (port < 0) return -1;
  thread_ = std::make_unique<std::thread>([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port;
}

void SessionServer::stop() {
  if (http_) http_->stop();
  if (thread_ && thread_->joinable()) thread_->join();
  thread_.reset();
}

}  // namespace qrw
