#pragma once

#include <string>

#include "nsvs/camera.hpp"
#include "nsvs/kinematics.hpp"

namespace nsvs {

/// Gains and safeguards of the adaptive vision-space / null-space controller.
/// Matrix gains are diagonal and stored as their diagonals.
struct ControllerConfig {
  Vec2 kp = Vec2::Constant(2.0);  // 1/s
  double cd = 1.0;                // damping factor of the null-space model
  Vec4 lz = Vec4::Constant(0.001);
  VecX lk = VecX::Constant(9, 0.001);
  double z_floor = 0.05;
  double sigma_floor = 1e-6;        // image-Jacobian pseudo-inverse damping
  double damping_threshold = 1e-6;  // robot-Jacobian pseudo-inverse damping
  bool adaptation_enabled = true;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

enum class IntentSource { none, slider, cartesian_drag, scripted };

std::string to_string(IntentSource s);

/// Human effort in joint space. A zero vector means no intervention.
struct HumanIntent {
  VecX d;
  IntentSource source = IntentSource::none;
  double timestamp = 0.0;
};

/// Backward-difference rates of the measured pixel and feature position.
struct MeasuredRates {
  Vec2 x_dot = Vec2::Zero();
  Vec3 r_dot = Vec3::Zero();
};

struct TaskTerm {
  VecX u_T;
  DepthEstimate z_hat;
  ImageJacobianEstimate js;
};

/// u_T = -z_hat J^+ J_s_hat^+ K_p (x - x_d).
TaskTerm task_term(const JacobianBundle& bundle, const EstimatorState& est, const Vec2& x,
                   const Vec2& x_d, const Vec3& r, const ControllerConfig& cfg);

/// One explicit-Euler step of the depth and image-Jacobian adaptation laws.
/// Returns `est` unchanged when adaptation is disabled.
EstimatorState adapt_step(const EstimatorState& est, const Vec2& x_dot, const Vec3& r_dot,
                          const Vec2& x, const Vec2& x_d, const Vec3& r,
                          const ControllerConfig& cfg, double dt);

/// u_N = N (d / c_d).
VecX nullspace_term(const JacobianBundle& bundle, const VecX& d, const ControllerConfig& cfg);

struct ControlOutput {
  VecX u;
  VecX u_T;
  VecX u_N;
  Vec2 e = Vec2::Zero();
  double z_hat = 0.0;
  bool z_clamped = false;
  bool js_damped = false;
  bool j_damped = false;
  double sigma_min = 0.0;
  double null_residual = 0.0;  // |N (c_d u - d)|
};

struct ControlStep {
  ControlOutput out;
  EstimatorState next;
};

/// Full control law u = u_T + u_N plus one adaptation step. `r` is h(q) from
/// the known robot model; `x` is the measured pixel. Throws IntegrityError if
/// any input or result is non-finite.
ControlStep control_step(const RobotModel& robot, const VecX& q, const Vec2& x, const Vec2& x_d,
                         const VecX& d, const EstimatorState& est, const ControllerConfig& cfg,
                         const MeasuredRates& rates, double dt);

/// Control law only, no adaptation; used by the simulator's RK4 stages.
VecX control_law(const RobotModel& robot, const VecX& q, const Vec2& x, const Vec2& x_d,
                 const VecX& d, const EstimatorState& est, const ControllerConfig& cfg);

/// V = 1/2 e'e + 1/2 dk' Lk^-1 dk + 1/2 dz' Lz^-1 dz with d = theta - theta_hat.
double lyapunov_value(const Vec2& e, const EstimatorState& est, const TrueParams& truth,
                      const ControllerConfig& cfg);

}  // namespace nsvs
