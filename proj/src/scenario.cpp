#include "nsvs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "nsvs/errors.hpp"

namespace nsvs {

using nlohmann::json;

namespace {

/// Collects issues while reading a JSON document with path-tagged errors.
class Reader {
 public:
  std::vector<ValidationIssue> issues;

  void fail(const std::string& path, const std::string& message) {
    issues.push_back({path, message});
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  bool object(const json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    return true;
  }

  void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) fail(join(path, key), "unknown key");
    }
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "expected a number");
      return fallback;
    }
    return v.get<double>();
  }

  bool boolean(const json& obj, const std::string& key, const std::string& path, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(join(path, key), "expected true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::string string(const json& obj, const std::string& key, const std::string& path,
                     const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      fail(join(path, key), "expected a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  /// Array of numbers; size -1 accepts any length.
  std::optional<VecX> vector(const json& v, const std::string& path, Eigen::Index size) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    if (size >= 0 && static_cast<Eigen::Index>(v.size()) != size) {
      fail(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
      return std::nullopt;
    }
    VecX out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(path + "[" + std::to_string(i) + "]", "expected a number");
        return std::nullopt;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  /// A diagonal gain given either as a scalar or as its full diagonal.
  VecX diagonal(const json& obj, const std::string& key, const std::string& path, Eigen::Index size,
                double fallback) {
    if (!obj.contains(key)) return VecX::Constant(size, fallback);
    const auto& v = obj.at(key);
    if (v.is_number()) return VecX::Constant(size, v.get<double>());
    if (auto vec = vector(v, join(path, key), size)) return *vec;
    return VecX::Constant(size, fallback);
  }
};

json to_json(const VecX& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

template <int N>
json to_json(const Eigen::Matrix<double, N, 1>& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void read_robot(Reader& rd, const json& doc, Scenario& s, bool& robot_is_preset) {
  robot_is_preset = true;
  if (!doc.contains("robot")) return;
  const json& j = doc.at("robot");
  if (!rd.object(j, "robot")) return;
  rd.reject_unknown(j, "robot", {"preset", "name", "dh", "feature_offset"});
  if (j.contains("preset") && j.contains("dh")) {
    rd.fail("robot", "give either 'preset' or 'dh', not both");
  }
  if (j.contains("preset")) {
    const std::string name = rd.string(j, "preset", "robot", "ur5");
    try {
      s.robot = robot_preset(name);
    } catch (const ConfigError& e) {
      rd.fail("robot.preset", e.what());
    }
  } else if (j.contains("dh")) {
    robot_is_preset = false;
    const json& rows = j.at("dh");
    s.robot = RobotModel{};
    s.robot.name = rd.string(j, "name", "robot", "custom");
    if (!rows.is_array() || rows.empty()) {
      rd.fail("robot.dh", "expected a non-empty array of DH rows");
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string p = "robot.dh[" + std::to_string(i) + "]";
        if (!rd.object(rows[i], p)) continue;
        rd.reject_unknown(rows[i], p, {"d", "a", "alpha", "theta_offset"});
        DhRow row;
        row.d = rd.number(rows[i], "d", p, 0.0);
        row.a = rd.number(rows[i], "a", p, 0.0);
        row.alpha = rd.number(rows[i], "alpha", p, 0.0);
        row.theta_offset = rd.number(rows[i], "theta_offset", p, 0.0);
        s.robot.joints.push_back(row);
      }
    }
  }
  if (j.contains("name") && j.contains("preset")) s.robot.name = rd.string(j, "name", "robot", s.robot.name);
  if (j.contains("feature_offset")) {
    if (auto v = rd.vector(j.at("feature_offset"), "robot.feature_offset", 3)) {
      s.robot.feature_offset = *v;
    }
  }
}

void read_camera(Reader& rd, const json& doc, Scenario& s) {
  if (!doc.contains("camera")) return;
  const json& j = doc.at("camera");
  if (!rd.object(j, "camera")) return;
  rd.reject_unknown(j, "camera", {"preset", "P", "image_size"});
  if (j.contains("preset") && j.contains("P")) rd.fail("camera", "give either 'preset' or 'P', not both");
  if (j.contains("preset")) {
    const std::string name = rd.string(j, "preset", "camera", "desk");
    if (name != "desk") rd.fail("camera.preset", "unknown camera preset '" + name + "'");
    s.camera = desk_camera_preset();
  }
  if (j.contains("P")) {
    const json& P = j.at("P");
    if (!P.is_array() || P.size() != 3) {
      rd.fail("camera.P", "expected 3 rows of 4 numbers");
    } else {
      for (int row = 0; row < 3; ++row) {
        if (auto v = rd.vector(P[row], "camera.P[" + std::to_string(row) + "]", 4)) {
          s.camera.P.row(row) = v->transpose();
        }
      }
    }
  }
  if (j.contains("image_size")) {
    if (auto v = rd.vector(j.at("image_size"), "camera.image_size", 2)) {
      s.camera.width = static_cast<int>((*v)[0]);
      s.camera.height = static_cast<int>((*v)[1]);
    }
  }
}

void read_theta_init(Reader& rd, const json& doc, Scenario& s, int n_k) {
  if (!doc.contains("theta_init")) return;
  const json& j = doc.at("theta_init");
  if (!rd.object(j, "theta_init")) return;
  rd.reject_unknown(j, "theta_init", {"mode", "range", "theta_z", "theta_k"});
  const std::string mode = rd.string(j, "mode", "theta_init", "random");
  if (mode == "random") {
    s.theta_init.mode = ThetaInit::Mode::random;
    if (j.contains("range")) {
      if (auto v = rd.vector(j.at("range"), "theta_init.range", 2)) {
        s.theta_init.range = {(*v)[0], (*v)[1]};
      }
    }
  } else if (mode == "explicit") {
    s.theta_init.mode = ThetaInit::Mode::explicit_values;
    if (!j.contains("theta_z")) rd.fail("theta_init.theta_z", "required when mode is 'explicit'");
    if (!j.contains("theta_k")) rd.fail("theta_init.theta_k", "required when mode is 'explicit'");
    if (j.contains("theta_z")) {
      if (auto v = rd.vector(j.at("theta_z"), "theta_init.theta_z", 4)) s.theta_init.theta_z = *v;
    }
    if (j.contains("theta_k")) {
      if (auto v = rd.vector(j.at("theta_k"), "theta_init.theta_k", n_k)) s.theta_init.theta_k = *v;
    }
  } else if (mode == "truth") {
    s.theta_init.mode = ThetaInit::Mode::truth;
  } else {
    rd.fail("theta_init.mode", "expected 'random', 'explicit' or 'truth'");
  }
}

void read_gains(Reader& rd, const json& doc, Scenario& s, int n_k) {
  ControllerConfig& g = s.gains;
  g.lk = VecX::Constant(n_k, 0.001);
  if (!doc.contains("gains")) return;
  const json& j = doc.at("gains");
  if (!rd.object(j, "gains")) return;
  rd.reject_unknown(j, "gains", {"kp", "cd", "lz", "lk", "z_floor", "sigma_floor",
                                 "damping_threshold", "adaptation"});
  g.kp = rd.diagonal(j, "kp", "gains", 2, 2.0);
  g.cd = rd.number(j, "cd", "gains", 1.0);
  g.lz = rd.diagonal(j, "lz", "gains", 4, 0.001);
  g.lk = rd.diagonal(j, "lk", "gains", n_k, 0.001);
  g.z_floor = rd.number(j, "z_floor", "gains", 0.05);
  g.sigma_floor = rd.number(j, "sigma_floor", "gains", 1e-6);
  g.damping_threshold = rd.number(j, "damping_threshold", "gains", 1e-6);
  g.adaptation_enabled = rd.boolean(j, "adaptation", "gains", true);
}

void read_target(Reader& rd, const json& doc, Scenario& s) {
  if (!doc.contains("target")) return;
  const json& j = doc.at("target");
  if (!rd.object(j, "target")) return;
  const std::string type = rd.string(j, "type", "target", "setpoint");
  if (type == "setpoint") {
    rd.reject_unknown(j, "target", {"type", "point"});
    SetpointTarget t;
    if (j.contains("point")) {
      if (auto v = rd.vector(j.at("point"), "target.point", 2)) t.point = *v;
    }
    s.target = t;
  } else if (type == "circle") {
    rd.reject_unknown(j, "target", {"type", "center", "radius", "rate", "t0"});
    CircleTarget c;
    if (j.contains("center")) {
      if (auto v = rd.vector(j.at("center"), "target.center", 2)) c.center = *v;
    }
    c.radius = rd.number(j, "radius", "target", 100.0);
    c.rate = rd.number(j, "rate", "target", std::numbers::pi / 15.0);
    c.t0 = rd.number(j, "t0", "target", 0.0);
    s.target = c;
  } else {
    rd.fail("target.type", "expected 'setpoint' or 'circle'");
  }
}

void read_intent(Reader& rd, const json& doc, Scenario& s) {
  if (!doc.contains("intent")) return;
  const json& j = doc.at("intent");
  if (!j.is_array()) {
    rd.fail("intent", "expected an array of segments");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "intent[" + std::to_string(i) + "]";
    if (!rd.object(j[i], p)) continue;
    rd.reject_unknown(j[i], p, {"t_start", "t_end", "d"});
    IntentSegment seg;
    seg.t_start = rd.number(j[i], "t_start", p, 0.0);
    seg.t_end = rd.number(j[i], "t_end", p, 0.0);
    if (!j[i].contains("d")) {
      rd.fail(p + ".d", "required");
      continue;
    }
    if (auto v = rd.vector(j[i].at("d"), p + ".d", -1)) seg.d = *v;
    s.intent.segments.push_back(std::move(seg));
  }
}

void read_sim(Reader& rd, const json& doc, Scenario& s) {
  if (!doc.contains("sim")) return;
  const json& j = doc.at("sim");
  if (!rd.object(j, "sim")) return;
  rd.reject_unknown(j, "sim", {"dt", "duration", "integrator", "seed", "decimation", "max_joint_rate"});
  s.sim.dt = rd.number(j, "dt", "sim", s.sim.dt);
  s.sim.duration = rd.number(j, "duration", "sim", s.sim.duration);
  try {
    s.sim.integrator = integrator_from_string(rd.string(j, "integrator", "sim", "euler"));
  } catch (const ConfigError& e) {
    rd.fail("sim.integrator", e.what());
  }
  if (j.contains("seed")) {
    if (j.at("seed").is_number_unsigned()) {
      s.sim.seed = j.at("seed").get<std::uint64_t>();
    } else {
      rd.fail("sim.seed", "expected a non-negative integer");
    }
  }
  if (j.contains("decimation")) {
    if (j.at("decimation").is_number_integer()) {
      s.sim.decimation = j.at("decimation").get<int>();
    } else {
      rd.fail("sim.decimation", "expected an integer");
    }
  }
  s.sim.max_joint_rate = rd.number(j, "max_joint_rate", "sim", s.sim.max_joint_rate);
}

void read_noise(Reader& rd, const json& doc, Scenario& s) {
  if (!doc.contains("noise")) return;
  const json& j = doc.at("noise");
  if (!rd.object(j, "noise")) return;
  rd.reject_unknown(j, "noise", {"quantize", "amplitude"});
  s.noise.quantize = rd.boolean(j, "quantize", "noise", false);
  s.noise.amplitude = rd.number(j, "amplitude", "noise", 0.0);
}

void check_positive(std::vector<ValidationIssue>& issues, const std::string& path, const VecX& v) {
  if (!v.allFinite() || !(v.array() > 0.0).all()) issues.push_back({path, "must be positive"});
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  Reader rd;
  Scenario s;
  if (!rd.object(doc, "")) throw ValidationError(rd.issues);
  rd.reject_unknown(doc, "", {"schema_version", "name", "robot", "camera", "initial_q",
                              "parameterization", "theta_init", "gains", "target", "intent",
                              "sim", "noise", "metrics"});

  if (doc.contains("schema_version")) {
    const auto& v = doc.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kScenarioSchemaVersion) {
      rd.fail("schema_version", "unsupported schema version (expected " +
                                    std::to_string(kScenarioSchemaVersion) + ")");
    }
  }
  s.name = rd.string(doc, "name", "", "");

  bool robot_is_preset = true;
  read_robot(rd, doc, s, robot_is_preset);
  read_camera(rd, doc, s);

  if (doc.contains("initial_q")) {
    if (auto v = rd.vector(doc.at("initial_q"), "initial_q", s.robot.dof())) s.initial_q = *v;
  } else if (robot_is_preset && s.robot.name == "ur5") {
    s.initial_q = ur5_home_pose();
  } else if (robot_is_preset) {
    s.initial_q = VecX::Zero(s.robot.dof());
  } else {
    rd.fail("initial_q", "required for a custom robot");
  }

  try {
    s.layout = param_layout_from_string(rd.string(doc, "parameterization", "", "shared_depth_row"));
  } catch (const ConfigError& e) {
    rd.fail("parameterization", e.what());
  }
  const int n_k = param_count(s.layout);

  read_theta_init(rd, doc, s, n_k);
  read_gains(rd, doc, s, n_k);
  read_target(rd, doc, s);
  read_intent(rd, doc, s);
  read_sim(rd, doc, s);
  read_noise(rd, doc, s);

  if (doc.contains("metrics")) {
    const json& j = doc.at("metrics");
    if (rd.object(j, "metrics")) {
      rd.reject_unknown(j, "metrics", {"convergence_threshold"});
      s.convergence_threshold = rd.number(j, "convergence_threshold", "metrics", 5.0);
    }
  }

  if (rd.issues.empty()) {
    validate_scenario(s);
    return s;
  }
  // Report value problems alongside the parse problems. Fields that failed to
  // parse kept their defaults, so they don't produce duplicates here.
  try {
    validate_scenario(s);
  } catch (const ValidationError& e) {
    rd.issues.insert(rd.issues.end(), e.issues().begin(), e.issues().end());
  }
  throw ValidationError(rd.issues);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({{path.string(), "cannot open scenario file"}});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({{path.string(), std::string("malformed JSON: ") + e.what()}});
  }
  return scenario_from_json(doc);
}

Scenario load_scenario(const std::string& name_or_path) {
  if (name_or_path == "task1") return task1_preset();
  if (name_or_path == "task2") return task2_preset();
  return parse_scenario(name_or_path);
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;

  json rows = json::array();
  for (const auto& row : s.robot.joints) {
    rows.push_back({{"d", row.d}, {"a", row.a}, {"alpha", row.alpha}, {"theta_offset", row.theta_offset}});
  }
  doc["robot"] = {{"name", s.robot.name}, {"dh", rows}, {"feature_offset", to_json(s.robot.feature_offset)}};

  json P = json::array();
  for (int r = 0; r < 3; ++r) P.push_back(to_json(VecX(s.camera.P.row(r).transpose())));
  doc["camera"] = {{"P", P}, {"image_size", {s.camera.width, s.camera.height}}};

  doc["initial_q"] = to_json(s.initial_q);
  doc["parameterization"] = to_string(s.layout);

  switch (s.theta_init.mode) {
    case ThetaInit::Mode::random:
      doc["theta_init"] = {{"mode", "random"}, {"range", {s.theta_init.range[0], s.theta_init.range[1]}}};
      break;
    case ThetaInit::Mode::explicit_values:
      doc["theta_init"] = {{"mode", "explicit"},
                           {"theta_z", to_json(s.theta_init.theta_z)},
                           {"theta_k", to_json(s.theta_init.theta_k)}};
      break;
    case ThetaInit::Mode::truth:
      doc["theta_init"] = {{"mode", "truth"}};
      break;
  }

  const ControllerConfig& g = s.gains;
  doc["gains"] = {{"kp", to_json(g.kp)},
                  {"cd", g.cd},
                  {"lz", to_json(g.lz)},
                  {"lk", to_json(g.lk)},
                  {"z_floor", g.z_floor},
                  {"sigma_floor", g.sigma_floor},
                  {"damping_threshold", g.damping_threshold},
                  {"adaptation", g.adaptation_enabled}};

  if (const auto* sp = std::get_if<SetpointTarget>(&s.target)) {
    doc["target"] = {{"type", "setpoint"}, {"point", to_json(sp->point)}};
  } else {
    const auto& c = std::get<CircleTarget>(s.target);
    doc["target"] = {{"type", "circle"},
                     {"center", to_json(c.center)},
                     {"radius", c.radius},
                     {"rate", c.rate},
                     {"t0", c.t0}};
  }

  json intent = json::array();
  for (const auto& seg : s.intent.segments) {
    intent.push_back({{"t_start", seg.t_start}, {"t_end", seg.t_end}, {"d", to_json(seg.d)}});
  }
  doc["intent"] = intent;

  doc["sim"] = {{"dt", s.sim.dt},
                {"duration", s.sim.duration},
                {"integrator", to_string(s.sim.integrator)},
                {"seed", s.sim.seed},
                {"decimation", s.sim.decimation},
                {"max_joint_rate", s.sim.max_joint_rate}};
  doc["noise"] = {{"quantize", s.noise.quantize}, {"amplitude", s.noise.amplitude}};
  doc["metrics"] = {{"convergence_threshold", s.convergence_threshold}};
  return doc;
}

void validate_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  const int n = s.robot.dof();
  const int n_k = param_count(s.layout);

  if (!s.robot.is_redundant()) {
    issues.push_back({"robot.dh", "robot needs more than 3 joints for a non-trivial null space"});
  }
  if (s.initial_q.size() != n || !s.initial_q.allFinite()) {
    issues.push_back({"initial_q", "expected " + std::to_string(n) + " finite joint angles"});
  }

  check_positive(issues, "gains.kp", s.gains.kp);
  if (!(s.gains.cd > 0.0)) issues.push_back({"gains.cd", "must be positive"});
  check_positive(issues, "gains.lz", s.gains.lz);
  if (s.gains.lk.size() != n_k) {
    issues.push_back({"gains.lk", "expected " + std::to_string(n_k) + " entries for " + to_string(s.layout)});
  } else {
    check_positive(issues, "gains.lk", s.gains.lk);
  }
  if (!(s.gains.z_floor > 0.0)) issues.push_back({"gains.z_floor", "must be positive"});
  if (!(s.gains.sigma_floor > 0.0)) issues.push_back({"gains.sigma_floor", "must be positive"});
  if (!(s.gains.damping_threshold > 0.0)) {
    issues.push_back({"gains.damping_threshold", "must be positive"});
  }

  if (s.theta_init.mode == ThetaInit::Mode::random) {
    const auto [lo, hi] = s.theta_init.range;
    if (!(lo > 0.0 && hi >= lo && std::isfinite(hi))) {
      issues.push_back({"theta_init.range", "expected 0 < low <= high"});
    }
  } else if (s.theta_init.mode == ThetaInit::Mode::explicit_values) {
    if (s.theta_init.theta_k.size() != n_k) {
      issues.push_back({"theta_init.theta_k", "expected " + std::to_string(n_k) + " entries"});
    }
    if (!s.theta_init.theta_z.allFinite() || !s.theta_init.theta_k.allFinite()) {
      issues.push_back({"theta_init", "non-finite initial estimate"});
    }
  }

  if (const auto* c = std::get_if<CircleTarget>(&s.target)) {
    if (!(c->radius >= 0.0)) issues.push_back({"target.radius", "must be non-negative"});
    if (!std::isfinite(c->rate)) issues.push_back({"target.rate", "must be finite"});
  }

  for (std::size_t i = 0; i < s.intent.segments.size(); ++i) {
    const auto& seg = s.intent.segments[i];
    const std::string p = "intent[" + std::to_string(i) + "]";
    if (seg.d.size() != n) issues.push_back({p + ".d", "expected " + std::to_string(n) + " entries"});
    if (!seg.d.allFinite()) issues.push_back({p + ".d", "must be finite"});
    if (!(seg.t_end > seg.t_start)) issues.push_back({p + ".t_end", "must be after t_start"});
  }

  if (!(s.sim.dt > 0.0)) issues.push_back({"sim.dt", "must be positive"});
  if (!(s.sim.duration >= s.sim.dt)) issues.push_back({"sim.duration", "must be at least dt"});
  if (s.sim.decimation < 1) issues.push_back({"sim.decimation", "must be at least 1"});
  if (!(s.sim.max_joint_rate > 0.0)) issues.push_back({"sim.max_joint_rate", "must be positive"});
  if (!(s.noise.amplitude >= 0.0)) issues.push_back({"noise.amplitude", "must be non-negative"});
  if (!(s.convergence_threshold > 0.0)) {
    issues.push_back({"metrics.convergence_threshold", "must be positive"});
  }

  if (!s.camera.P.allFinite()) issues.push_back({"camera.P", "must be finite"});
  if (s.camera.width <= 0 || s.camera.height <= 0) {
    issues.push_back({"camera.image_size", "must be positive"});
  }

  // Kinematic probes only make sense once the shapes are right.
  if (issues.empty()) {
    try {
      if (make_bundle(s.robot, s.initial_q, s.gains.damping_threshold).damped) {
        issues.push_back({"initial_q", "starting configuration is singular"});
      }
    } catch (const std::exception& e) {
      issues.push_back({"initial_q", e.what()});
    }

    // Depth must stay positive over the workspace neighbourhood the task explores.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> jitter(-0.75, 0.75);
    for (int sample = 0; sample < 256; ++sample) {
      VecX q = s.initial_q;
      if (sample > 0) {
        for (int i = 0; i < n; ++i) q[i] += jitter(rng);
      }
      const Vec3 r = forward_kinematics(s.robot, q);
      const double z = s.camera.a().dot(r) + s.camera.b();
      if (!(z > 0.0)) {
        issues.push_back({"camera.P", "feature depth is not positive in the probe sweep around initial_q"});
        break;
      }
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Scenario task1_preset() {
  Scenario s;
  s.name = "task1";
  s.gains.kp = Vec2::Constant(2.0);
  s.gains.cd = 1.0;
  s.target = SetpointTarget{Vec2(720.0, 540.0)};
  VecX d(6);
  d << 0.0, 0.3, -0.2, 0.0, 0.0, 0.0;
  s.intent.segments = {{6.0, 16.0, d}, {20.0, 30.0, VecX::Zero(6) - d}};  // not -d: avoids -0.0 in the echoed config
  s.sim.duration = 35.0;
  return s;
}

Scenario task2_preset() {
  Scenario s;
  s.name = "task2";
  s.gains.kp = Vec2::Constant(5.0);
  s.gains.cd = 0.5;
  s.target = CircleTarget{Vec2(720.0, 540.0), 100.0, std::numbers::pi / 15.0, 5.0};
  VecX d = VecX::Zero(6);
  d[2] = 0.5;
  s.intent.segments = {{20.0, 35.0, d}, {45.0, 60.0, VecX::Zero(6) - d}};
  s.sim.duration = 65.0;
  s.sim.integrator = Integrator::rk4;
  return s;
}

EstimatorState initial_estimate(const Scenario& s) {
  const TrueParams truth = true_params(s.camera, s.layout);
  EstimatorState est;
  switch (s.theta_init.mode) {
    case ThetaInit::Mode::truth:
      est.theta_z = truth.theta_z;
      est.theta_k = truth.theta_k;
      break;
    case ThetaInit::Mode::explicit_values:
      est.theta_z = s.theta_init.theta_z;
      est.theta_k = s.theta_init.theta_k;
      break;
    case ThetaInit::Mode::random: {
      std::mt19937_64 rng(s.sim.seed);
      std::uniform_real_distribution<double> log_factor(std::log(s.theta_init.range[0]),
                                                        std::log(s.theta_init.range[1]));
      est.theta_z = truth.theta_z;
      est.theta_k = truth.theta_k;
      for (Eigen::Index i = 0; i < est.theta_z.size(); ++i) est.theta_z[i] *= std::exp(log_factor(rng));
      for (Eigen::Index i = 0; i < est.theta_k.size(); ++i) est.theta_k[i] *= std::exp(log_factor(rng));
      break;
    }
  }
  return est;
}

SimSetup make_setup(const Scenario& s) {
  SimSetup setup;
  setup.robot = s.robot;
  setup.camera = s.camera;
  setup.controller = s.gains;
  setup.sim = s.sim;
  setup.target = s.target;
  setup.q0 = s.initial_q;
  setup.est0 = initial_estimate(s);
  setup.noise = s.noise;
  return setup;
}

}  // namespace nsvs
