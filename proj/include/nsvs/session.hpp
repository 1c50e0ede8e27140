#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nsvs/scenario.hpp"
#include "nsvs/simulator.hpp"

namespace nsvs {

struct DragMapping {
  VecX d;
  bool damped = false;  // singular (or empty) base-to-joint Jacobian
  double sigma_min = 0.0;
};

/// Joint-space intent for dragging the origin of joint `joint` (1-based) with
/// velocity gain * vec: d = [J_j^+ v; 0], where J_j is the position Jacobian of
/// that origin over the joints that can move it (1 .. joint-1). Joints from
/// `joint` on get zero.
DragMapping map_cartesian_drag(const RobotModel& robot, int joint, const Vec3& vec, const VecX& q,
                               double gain, double damping_threshold = 1e-6);

struct SessionConfig {
  std::string session_id = "session";
  int decimation = 1;           // broadcast every K-th step
  double intent_ttl = 0.5;      // s of session time; <= 0 holds intents until replaced
  double default_drag_gain = 1.0;
  bool keep_log = false;        // retain every TelemetryRecord (tests, replay checks)
};

/// Non-zero intent applied at one step, or a target change that took effect
/// there. Steps without an entry ran with d = 0.
struct TraceEntry {
  std::int64_t step = 0;
  VecX d;
  std::optional<Vec2> target;
};

/// Replays `steps` steps of a recorded session trace headless. Produces the
/// same telemetry as the live session did for those steps.
std::vector<TelemetryRecord> replay_trace(const Scenario& s, const std::vector<TraceEntry>& trace,
                                          std::int64_t steps);

/// Transport-independent session state machine. Not thread-safe; the server
/// serializes access.
class SessionCore {
 public:
  SessionCore(Scenario scenario, SessionConfig config);

  /// Handles one inbound message and returns the ack or error reply. Intents
  /// are stored and applied at the next step boundary (latest wins).
  nlohmann::json handle(const nlohmann::json& msg);

  /// Same for raw text; malformed JSON yields an error reply.
  nlohmann::json handle_text(const std::string& text);

  /// Advances one step unless paused. Returns a state message when this step
  /// is due for broadcast, or an error message if the simulation failed (the
  /// session then pauses).
  std::optional<nlohmann::json> tick();

  nlohmann::json robot_description() const;
  const std::optional<nlohmann::json>& latest_state() const { return latest_state_; }

  bool paused() const { return paused_; }
  double time() const { return sim_.time(); }
  std::int64_t step() const { return sim_.state().step; }
  const Simulator& simulator() const { return sim_; }
  const Scenario& scenario() const { return scenario_; }
  const SessionConfig& config() const { return config_; }

  /// Intents and target changes since the last reset.
  const std::vector<TraceEntry>& trace() const { return trace_; }
  /// Telemetry since the last reset; empty unless SessionConfig::keep_log.
  const std::vector<TelemetryRecord>& log() const { return log_; }

 private:
  struct PendingIntent {
    std::string mode;
    VecX d;
    int joint = 0;
    Vec3 vec = Vec3::Zero();
    double gain = 1.0;
    double stamp = 0.0;  // session time when received
  };

  nlohmann::json envelope(const std::string& type);
  nlohmann::json error(const std::string& message, const nlohmann::json& ref);
  nlohmann::json handle_intent(const nlohmann::json& msg);
  nlohmann::json handle_command(const nlohmann::json& msg);
  nlohmann::json state_message(const TelemetryRecord& rec);
  VecX current_intent(bool& drag_damped);

  Scenario scenario_;
  SessionConfig config_;
  Simulator sim_;
  std::uint64_t seq_ = 0;
  bool paused_ = false;
  std::optional<PendingIntent> intent_;
  std::optional<Vec2> pending_target_;
  std::vector<TraceEntry> trace_;
  std::vector<TelemetryRecord> log_;
  std::optional<nlohmann::json> latest_state_;
};

}  // namespace nsvs
