#include "nsvs/session.hpp"

#include <cmath>

#include "nsvs/errors.hpp"

namespace nsvs {

using nlohmann::json;

namespace {

json vec_json(const auto& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

/// Reads a numeric array of the given length; nullopt on any mismatch.
std::optional<VecX> read_vector(const json& j, Eigen::Index size) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) return std::nullopt;
  VecX v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) return std::nullopt;
    v[i] = e.get<double>();
    if (!std::isfinite(v[i])) return std::nullopt;
  }
  return v;
}

}  // namespace

DragMapping map_cartesian_drag(const RobotModel& robot, int joint, const Vec3& vec, const VecX& q,
                               double gain, double damping_threshold) {
  if (joint < 1 || joint > robot.dof()) {
    throw ConfigError("drag joint " + std::to_string(joint) + " out of range 1.." +
                      std::to_string(robot.dof()));
  }
  if (!vec.allFinite() || !std::isfinite(gain)) throw ConfigError("drag vector must be finite");

  DragMapping out;
  out.d = VecX::Zero(robot.dof());
  if (joint == 1) {
    // The first joint's origin is fixed to the base.
    out.damped = true;
    return out;
  }
  const MatX J = joint_origin_jacobian(robot, q, joint).leftCols(joint - 1);
  try {
    const PseudoInverse pi = pseudo_inverse(J, damping_threshold);
    out.d.head(joint - 1) = pi.pinv * (gain * vec);
    out.damped = pi.damped;
    out.sigma_min = pi.sigma_min;
  } catch (const SingularityError&) {
    out.damped = true;
  }
  return out;
}

std::vector<TelemetryRecord> replay_trace(const Scenario& s, const std::vector<TraceEntry>& trace,
                                          std::int64_t steps) {
  Simulator sim(make_setup(s));
  const int n = s.robot.dof();
  std::vector<TelemetryRecord> log;
  std::size_t next = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    VecX d = VecX::Zero(n);
    for (; next < trace.size() && trace[next].step == k; ++next) {
      if (trace[next].target) sim.set_target(SetpointTarget{*trace[next].target});
      if (trace[next].d.size() == n) d = trace[next].d;
    }
    log.push_back(sim.step(d));
  }
  return log;
}

SessionCore::SessionCore(Scenario scenario, SessionConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)), sim_(make_setup(scenario_)) {
  if (config_.decimation < 1) throw ConfigError("decimation must be at least 1");
}

json SessionCore::envelope(const std::string& type) {
  return {{"type", type}, {"session_id", config_.session_id}, {"seq", ++seq_}};
}

json SessionCore::error(const std::string& message, const json& ref) {
  json out = envelope("error");
  out["message"] = message;
  if (!ref.is_null()) out["ref"] = ref;
  return out;
}

json SessionCore::handle_text(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error& e) {
    return error(std::string("malformed message: ") + e.what(), nullptr);
  }
  return handle(msg);
}

json SessionCore::handle(const json& msg) {
  if (!msg.is_object()) return error("message must be an object", nullptr);
  const json ref = msg.contains("seq") ? msg.at("seq") : json(nullptr);
  const auto type_it = msg.find("type");
  if (type_it == msg.end() || !type_it->is_string()) return error("missing message type", ref);
  const std::string type = type_it->get<std::string>();
  json reply;
  if (type == "intent") {
    reply = handle_intent(msg);
  } else if (type == "command") {
    reply = handle_command(msg);
  } else {
    return error("unknown message type '" + type + "'", ref);
  }
  if (!ref.is_null()) reply["ref"] = ref;
  return reply;
}

json SessionCore::handle_intent(const json& msg) {
  const int n = scenario_.robot.dof();
  const std::string mode = msg.value("mode", std::string("slider"));
  PendingIntent pending;
  pending.mode = mode;
  pending.stamp = sim_.time();
  if (mode == "slider") {
    const auto d = msg.contains("d") ? read_vector(msg.at("d"), n) : std::nullopt;
    if (!d) return error("slider intent needs d with " + std::to_string(n) + " finite entries", nullptr);
    pending.d = *d;
  } else if (mode == "cartesian_drag") {
    if (msg.contains("d")) {
      // A pre-projected drag; treated like a slider vector.
      const auto d = read_vector(msg.at("d"), n);
      if (!d) return error("d must have " + std::to_string(n) + " finite entries", nullptr);
      pending.d = *d;
    } else {
      const auto joint = msg.find("joint");
      if (joint == msg.end() || !joint->is_number_integer() || joint->get<int>() < 1 ||
          joint->get<int>() > n) {
        return error("drag intent needs joint in 1.." + std::to_string(n), nullptr);
      }
      const auto vec = msg.contains("vec") ? read_vector(msg.at("vec"), 3) : std::nullopt;
      if (!vec) return error("drag intent needs vec with 3 finite entries", nullptr);
      pending.joint = joint->get<int>();
      pending.vec = *vec;
      pending.gain = config_.default_drag_gain;
      if (msg.contains("gain")) {
        if (!msg.at("gain").is_number()) return error("gain must be a number", nullptr);
        pending.gain = msg.at("gain").get<double>();
      }
    }
  } else {
    return error("unknown intent mode '" + mode + "'", nullptr);
  }
  intent_ = std::move(pending);
  json out = envelope("ack");
  out["of"] = "intent";
  return out;
}

json SessionCore::handle_command(const json& msg) {
  const std::string action = msg.value("action", std::string());
  if (action == "pause") {
    paused_ = true;
  } else if (action == "resume") {
    paused_ = false;
  } else if (action == "reset") {
    sim_.reset();
    intent_.reset();
    pending_target_.reset();
    trace_.clear();
    log_.clear();
    latest_state_.reset();
  } else if (action == "set_target") {
    const auto target = msg.contains("target") ? read_vector(msg.at("target"), 2) : std::nullopt;
    if (!target) return error("set_target needs target with 2 finite entries", nullptr);
    pending_target_ = Vec2(*target);
  } else {
    return error("unknown command action '" + action + "'", nullptr);
  }
  json out = envelope("ack");
  out["of"] = action;
  return out;
}

VecX SessionCore::current_intent(bool& drag_damped) {
  const int n = scenario_.robot.dof();
  drag_damped = false;
  if (!intent_) return VecX::Zero(n);
  if (config_.intent_ttl > 0.0 && sim_.time() - intent_->stamp >= config_.intent_ttl - 1e-12) {
    intent_.reset();
    return VecX::Zero(n);
  }
  if (intent_->joint == 0) return intent_->d;
  const DragMapping m = map_cartesian_drag(scenario_.robot, intent_->joint, intent_->vec,
                                           sim_.state().q, intent_->gain,
                                           scenario_.gains.damping_threshold);
  drag_damped = m.damped;
  return m.d;
}

std::optional<json> SessionCore::tick() {
  if (paused_) return std::nullopt;
  const std::int64_t k = sim_.state().step;
  bool drag_damped = false;
  const VecX d = current_intent(drag_damped);

  TraceEntry entry;
  entry.step = k;
  if (pending_target_) {
    sim_.set_target(SetpointTarget{*pending_target_});
    entry.target = pending_target_;
    pending_target_.reset();
  }
  if (!d.isZero(0.0)) entry.d = d;
  if (entry.target || entry.d.size() > 0) trace_.push_back(entry);

  TelemetryRecord rec;
  try {
    rec = sim_.step(d);
  } catch (const std::exception& e) {
    paused_ = true;
    return error(std::string("simulation stopped: ") + e.what(), nullptr);
  }
  if (config_.keep_log) log_.push_back(rec);

  if (k % config_.decimation != 0) return std::nullopt;
  json state = state_message(rec);
  state["flags"]["drag_damped"] = drag_damped;
  latest_state_ = state;
  return state;
}

json SessionCore::state_message(const TelemetryRecord& rec) {
  json out = envelope("state");
  out["t"] = rec.t;
  out["step"] = rec.step;
  out["q"] = vec_json(rec.q);
  out["r"] = vec_json(rec.r);
  out["x"] = vec_json(rec.x);
  out["x_d"] = vec_json(rec.x_d);
  out["e"] = vec_json(rec.e);
  out["d"] = vec_json(rec.d);
  out["u"] = vec_json(rec.u);
  out["z_hat"] = rec.z_hat;
  out["z_true"] = rec.z_true;
  out["V"] = rec.V;
  out["null_residual"] = rec.null_residual;
  out["sigma_min"] = rec.sigma_min;
  out["theta_z"] = vec_json(rec.est.theta_z);
  out["theta_k"] = vec_json(rec.est.theta_k);
  out["flags"] = {{"z_clamped", rec.z_clamped},
                  {"j_damped", rec.j_damped},
                  {"js_damped", rec.js_damped},
                  {"paused", paused_}};
  return out;
}

json SessionCore::robot_description() const {
  json dh = json::array();
  for (const auto& row : scenario_.robot.joints) {
    dh.push_back({{"d", row.d}, {"a", row.a}, {"alpha", row.alpha}, {"theta_offset", row.theta_offset}});
  }
  json P = json::array();
  for (int r = 0; r < 3; ++r) P.push_back(vec_json(scenario_.camera.P.row(r)));
  return {{"type", "robot"},
          {"session_id", config_.session_id},
          {"name", scenario_.robot.name},
          {"dof", scenario_.robot.dof()},
          {"dh", dh},
          {"feature_offset", vec_json(scenario_.robot.feature_offset)},
          {"initial_q", vec_json(scenario_.initial_q)},
          {"camera", {{"P", P}, {"image_size", {scenario_.camera.width, scenario_.camera.height}}}},
          {"dt", scenario_.sim.dt},
          {"decimation", config_.decimation},
          {"intent_ttl", config_.intent_ttl}};
}

}  // namespace nsvs
