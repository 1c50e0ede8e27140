#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nsvs/session.hpp"

namespace httplib {
class Server;
}

namespace nsvs {

/// Outbound message queue for one streaming client. Bounded; when full the
/// oldest message is dropped so a slow client never blocks the stepping loop.
class ClientQueue {
 public:
  explicit ClientQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(std::string message);
  /// Waits up to `timeout` for a message. Returns false on timeout or close.
  bool pop(std::string& out, std::chrono::milliseconds timeout);
  void close();
  bool closed() const;
  std::size_t dropped() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> items_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::filesystem::path static_dir;  // optional UI bundle, served at /
  std::size_t queue_capacity = 256;
};

/// HTTP front end of a SessionCore, paced at wall-clock dt.
///   GET  /events   server-sent event stream of outbound messages
///   POST /message  one inbound intent or command; the reply is the ack/error
///   GET  /robot    robot and camera description
///   GET  /state    latest state message
class SessionServer {
 public:
  SessionServer(SessionCore core, ServerOptions options);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Binds and starts the pacing and HTTP threads. Returns the bound port.
  int start();
  void stop();
  bool running() const { return running_; }

  int port() const { return port_; }
  std::size_t client_count() const;

 private:
  void pace();
  void broadcast(const std::string& text);
  std::shared_ptr<ClientQueue> subscribe();

  SessionCore core_;
  ServerOptions options_;
  mutable std::mutex core_mutex_;
  mutable std::mutex clients_mutex_;
  std::vector<std::shared_ptr<ClientQueue>> clients_;
  std::unique_ptr<httplib::Server> http_;
  std::thread http_thread_;
  std::thread pace_thread_;
  std::atomic<bool> running_{false};
  int port_ = 0;
};

}  // namespace nsvs
