#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "nsvs/camera.hpp"
#include "nsvs/controller.hpp"
#include "nsvs/kinematics.hpp"

namespace nsvs {

struct SetpointTarget {
  Vec2 point = Vec2(720.0, 540.0);
};

/// x_d(t) = center + radius (cos w(t - t0), sin w(t - t0)); held at the start
/// point for t < t0.
struct CircleTarget {
  Vec2 center = Vec2(720.0, 540.0);
  double radius = 100.0;  // px
  double rate = 0.0;      // rad/s
  double t0 = 0.0;
};

using TargetSpec = std::variant<SetpointTarget, CircleTarget>;

Vec2 desired_pixel(const TargetSpec& target, double t);

struct IntentSegment {
  double t_start = 0.0;
  double t_end = 0.0;  // exclusive
  VecX d;
};

/// Piecewise-constant scripted intent. Where segments overlap the one listed
/// last wins; outside every segment d = 0.
struct IntentSchedule {
  std::vector<IntentSegment> segments;

  VecX at(double t, int dof) const;
};

enum class Integrator { euler, rk4 };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);  // throws ConfigError

struct SimConfig {
  double dt = 1.0 / 30.0;
  double duration = 10.0;
  Integrator integrator = Integrator::euler;
  std::uint64_t seed = 0;
  int decimation = 1;
  double max_joint_rate = 1e3;  // rad/s, per joint

  std::int64_t step_count() const;
};

/// Optional degradation of the virtual camera's pixel measurement.
struct PixelNoise {
  bool quantize = false;
  double amplitude = 0.0;  // uniform noise in [-amplitude, amplitude] px
};

struct TelemetryRecord {
  std::int64_t step = 0;
  double t = 0.0;
  VecX q;
  Vec3 r = Vec3::Zero();
  Vec2 x = Vec2::Zero();
  Vec2 x_d = Vec2::Zero();
  Vec2 e = Vec2::Zero();
  VecX d;
  VecX u;
  VecX u_T;
  VecX u_N;
  double z_hat = 0.0;
  double z_true = 0.0;
  double V = 0.0;
  double null_residual = 0.0;
  double sigma_min = 0.0;
  bool z_clamped = false;
  bool j_damped = false;
  bool js_damped = false;
  EstimatorState est;  // estimate used to compute u at this step
};

struct SimState {
  std::int64_t step = 0;
  VecX q;
  EstimatorState est;
  Vec2 x_prev = Vec2::Zero();
  Vec3 r_prev = Vec3::Zero();
  bool has_prev = false;
};

struct SimSetup {
  RobotModel robot;
  CameraModel camera;
  ControllerConfig controller;
  SimConfig sim;
  TargetSpec target = SetpointTarget{};
  VecX q0;
  EstimatorState est0;
  PixelNoise noise;
};

/// Fixed-step kinematic plant qdot = u closed with the adaptive controller.
/// One instance is one stepping context.
class Simulator {
 public:
  explicit Simulator(SimSetup setup);

  /// Measures, computes the control, records, then advances q by one dt with
  /// `d` held across the step. Throws IntegrityError on non-finite state,
  /// DivergenceError when a joint rate exceeds SimConfig::max_joint_rate and
  /// BehindCameraError if the feature leaves the camera's depth range.
  TelemetryRecord step(const VecX& d);

  void reset();
  void set_target(TargetSpec target) { target_ = std::move(target); }

  const SimState& state() const { return state_; }
  const SimSetup& setup() const { return setup_; }
  const TrueParams& truth() const { return truth_; }
  const TargetSpec& target() const { return target_; }
  double time() const { return static_cast<double>(state_.step) * setup_.sim.dt; }

 private:
  Vec2 measure(const Vec2& x_exact);
  VecX derivative(const VecX& q, const Vec2& x_d, const VecX& d, const EstimatorState& est) const;

  SimSetup setup_;
  TrueParams truth_;
  TargetSpec target_;
  SimState state_;
  std::mt19937_64 noise_rng_;
};

}  // namespace nsvs
