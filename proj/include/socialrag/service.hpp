#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "socialrag/agent.hpp"

namespace httplib {
class Server;
}

namespace socialrag {

/// HTTP surface for the chat sandbox:
///   GET  /channels/{id}/feed?since={seq}
///   POST /channels/{id}/messages
///   POST /channels/{id}/messages/{seq}/reactions
///   POST /channels/{id}/messages/{seq}/replies
///   GET|PUT /channels/{id}/config
///   POST /channels/{id}/cycle
///   GET  /channels/{id}/report?format=csv|json
class Service {
 public:
  explicit Service(Agent& agent);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port (port 0 picks one).
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

  /// Persists every event to <dir>/<channel>.events.jsonl, after restoring existing logs.
  void persist_to(const std::filesystem::path& dir);

  /// Runs the scheduler every `interval` on a background thread until stop().
  void start_scheduler(std::chrono::milliseconds interval);

 private:
  void install_routes();

  Agent& agent_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread scheduler_thread_;
  std::atomic<bool> running_{false};
  std::mutex writers_mutex_;
  std::map<std::string, std::unique_ptr<EventLogWriter>> writers_;
};

/// Feed entry as served to the sandbox: the event plus rendered extras for bot posts.
nlohmann::ordered_json feed_entry(const SocialEvent& event);

}  // namespace socialrag
