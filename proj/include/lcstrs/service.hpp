#pragma once

#include "lcstrs/kernel.hpp"
#include "lcstrs/templates.hpp"

#include "json.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace lcstrs {

/// Reason codes of the service layer, next to the kernel's own.
namespace reason {
inline constexpr const char* kUnknownSession = "unknown-session";
inline constexpr const char* kBadRequest = "bad-request";
inline constexpr const char* kParse = "parse-error";
inline constexpr const char* kConflict = "concurrent-modification";
inline constexpr const char* kReplay = "replay-divergence";
inline constexpr const char* kTactic = "tactic-failed";
inline constexpr const char* kNotFound = "not-found";
}  // namespace reason

/// Lemmas of the program first, then its goals.
std::vector<Equation> goal_queue(const Program& p);

struct Session {
  std::string id;
  std::string program_text;
  std::size_t goal_index = 0;
  std::unique_ptr<Kernel> kernel;
  std::vector<TemplateMatch> templates;  // found at creation
  long version = 0;                       // bumped by every mutation
  std::string created, updated;           // UTC, ISO 8601
  mutable std::mutex mu;
};

/// State document of a session (the `/v1` schema, see README).
nlohmann::json state_json(const Session& s);
nlohmann::json template_json(const TemplateMatch& m, const Program& p);
nlohmann::json suggestions_json(const Session& s);

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// In-memory sessions with optional write-through persistence. All methods
/// are thread safe; mutations of one session are serialized and a second
/// concurrent mutation is answered with 409.
class SessionStore {
 public:
  explicit SessionStore(std::string trace_dir = "");

  /// Routes one request of the `/v1` API. `body` is the request body text.
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Loads every persisted session of the trace directory; returns the
  /// divergence reports of those that failed to replay.
  std::vector<std::string> load_all();

  /// Replays one persisted session; throws StepRejected on divergence.
  void load(const std::string& id);

  std::size_t size() const;

 private:
  std::string dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string fresh_id();
  void persist(const Session& s) const;
  void unpersist(const std::string& id) const;

  HttpResponse create(const nlohmann::json& req);
  HttpResponse import_trace(const nlohmann::json& req);
  HttpResponse apply_step(Session& s, const nlohmann::json& req);
  HttpResponse apply_tactic(Session& s, const nlohmann::json& req);
  HttpResponse undo(Session& s, const nlohmann::json& req);
};

/// Serves the store over HTTP until the process is stopped. Port 0 picks a
/// free port. `on_listen`, if given, runs once the socket is bound with the
/// bound port and a function that stops the server.
int serve_http(SessionStore& store, const std::string& host, int port,
               const std::function<void(int, std::function<void()>)>& on_listen = {});

}  // namespace lcstrs
