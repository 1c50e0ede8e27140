#include "nsvs/server.hpp"

#include <httplib.h>

#include <algorithm>

#include "nsvs/errors.hpp"

namespace nsvs {

using nlohmann::json;
using namespace std::chrono_literals;

void ClientQueue::push(std::string message) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    if (items_.size() >= capacity_) {
      items_.pop_front();
      ++dropped_;
    }
    items_.push_back(std::move(message));
  }
  cv_.notify_one();
}

bool ClientQueue::pop(std::string& out, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!cv_.wait_for(lock, timeout, [&] { return closed_ || !items_.empty(); })) return false;
  if (items_.empty()) return false;
  out = std::move(items_.front());
  items_.pop_front();
  return true;
}

void ClientQueue::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool ClientQueue::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

std::size_t ClientQueue::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

SessionServer::SessionServer(SessionCore core, ServerOptions options)
    : core_(std::move(core)), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {}

SessionServer::~SessionServer() { stop(); }

std::shared_ptr<ClientQueue> SessionServer::subscribe() {
  auto queue = std::make_shared<ClientQueue>(options_.queue_capacity);
  {
    std::lock_guard lock(core_mutex_);
    if (core_.latest_state()) queue->push(core_.latest_state()->dump());
  }
  std::lock_guard lock(clients_mutex_);
  clients_.push_back(queue);
  return queue;
}

std::size_t SessionServer::client_count() const {
  std::lock_guard lock(clients_mutex_);
  return static_cast<std::size_t>(std::count_if(
      clients_.begin(), clients_.end(), [](const auto& q) { return !q->closed(); }));
}

void SessionServer::broadcast(const std::string& text) {
  std::lock_guard lock(clients_mutex_);
  std::erase_if(clients_, [](const auto& q) { return q->closed(); });
  for (auto& q : clients_) q->push(text);
}

int SessionServer::start() {
  auto& srv = *http_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  srv.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    auto queue = subscribe();
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, queue](std::size_t, httplib::DataSink& sink) {
          std::string msg;
          if (queue->pop(msg, 250ms)) {
            const std::string frame = "data: " + msg + "\n\n";
            return sink.write(frame.data(), frame.size());
          }
          if (queue->closed() || !running_) {
            sink.done();
            return true;
          }
          // Keep-alive; a failed write tells us the client went away.
          static constexpr char ping[] = ": ping\n\n";
          return sink.write(ping, sizeof ping - 1);
        },
        [queue](bool) { queue->close(); });
  });

  srv.Post("/message", [this](const httplib::Request& req, httplib::Response& res) {
    json reply;
    {
      std::lock_guard lock(core_mutex_);
      reply = core_.handle_text(req.body);
    }
    res.status = reply.at("type") == "error" ? 400 : 200;
    res.set_content(reply.dump(), "application/json");
  });

  srv.Options("/message", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Get("/robot", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(core_mutex_);
    res.set_content(core_.robot_description().dump(), "application/json");
  });

  srv.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(core_mutex_);
    if (!core_.latest_state()) {
      res.status = 204;
      return;
    }
    res.set_content(core_.latest_state()->dump(), "application/json");
  });

  if (!options_.static_dir.empty() && !srv.set_mount_point("/", options_.static_dir.string())) {
    throw ConfigError("static directory not found: " + options_.static_dir.string());
  }

  port_ = options_.port == 0 ? srv.bind_to_any_port(options_.host)
                             : (srv.bind_to_port(options_.host, options_.port) ? options_.port : -1);
  if (port_ <= 0) {
    throw ConfigError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }

  running_ = true;
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  pace_thread_ = std::thread([this] { pace(); });
  return port_;
}

void SessionServer::pace() {
  const auto dt = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(core_.scenario().sim.dt));
  auto next = std::chrono::steady_clock::now();
  while (running_) {
    std::optional<json> out;
    {
      std::lock_guard lock(core_mutex_);
      out = core_.tick();
    }
    if (out) broadcast(out->dump());
    next += dt;
    const auto now = std::chrono::steady_clock::now();
    // After a long stall, resume pacing from now instead of bursting.
    if (now - next > 1s) next = now;
    std::this_thread::sleep_until(next);
  }
}

void SessionServer::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(clients_mutex_);
    for (auto& q : clients_) q->close();
  }
  http_->stop();
  if (pace_thread_.joinable()) pace_thread_.join();
  if (http_thread_.joinable()) http_thread_.join();
}

}  // namespace nsvs
