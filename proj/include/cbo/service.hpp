#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "cbo/engine.hpp"
#include "cbo/serialization.hpp"

namespace httplib {
class Server;
}

namespace cbo {

/// Environment variable naming the default state directory.
inline constexpr const char* kStateDirEnv = "CBO_STATE_DIR";

struct ServiceOptions {
  std::filesystem::path state_dir;
  Clock clock = system_clock();
  std::function<std::string()> new_id;  // random hex ids when empty
  std::optional<std::filesystem::path> static_dir;
};

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// The client-facing projection of a session.
Json session_view(const std::string& id, const Session& session);

/// Per-row history export of a session: one line per evaluation.
std::string session_csv(const std::string& id, const Session& session);

/// Error body {code, message} with the matching HTTP status.
HttpReply error_reply(const std::exception& e);

/// Session registry backed by one JSON file per session. Thread-safe: mutations of a
/// session are serialized, reads see the latest committed snapshot.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options);

  HttpReply create(const std::string& body);
  HttpReply show(const std::string& id);
  HttpReply init_observations(const std::string& id, const std::string& body);
  HttpReply propose(const std::string& id);
  HttpReply choice(const std::string& id, const std::string& body);
  HttpReply observation(const std::string& id, const std::string& body);
  HttpReply export_csv(const std::string& id);

  std::filesystem::path session_path(const std::string& id) const;
  const ServiceOptions& options() const { return options_; }

 private:
  struct Entry {
    std::mutex write;
    std::mutex snapshot_mutex;
    Session session;
    std::shared_ptr<const Session> snapshot;

    explicit Entry(Session s);
    std::shared_ptr<const Session> current();
  };

  std::shared_ptr<Entry> find(const std::string& id);
  void persist(const std::string& id, Entry& entry);
  template <typename F>
  HttpReply mutate(const std::string& id, F&& f);

  ServiceOptions options_;
  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

void install_routes(httplib::Server& server, SessionService& service);

/// Blocks serving on host:port until the server is stopped.
int serve(const std::string& host, int port, ServiceOptions options);

}  // namespace cbo
