#include "nsvs/controller.hpp"

#include "nsvs/errors.hpp"

namespace nsvs {
namespace {

void require_finite(const char* what, bool finite) {
  if (!finite) throw IntegrityError(std::string("non-finite ") + what);
}

}  // namespace

void ControllerConfig::validate() const {
  auto positive = [](const auto& v) { return v.allFinite() && (v.array() > 0.0).all(); };
  if (!positive(kp)) throw ConfigError("gains.kp must be positive");
  if (!(cd > 0.0)) throw ConfigError("gains.cd must be positive");
  if (!positive(lz)) throw ConfigError("gains.lz must be positive");
  if (lk.size() != 9 && lk.size() != 12) {
    throw ConfigError("gains.lk must have 9 or 12 entries");
  }
  if (!positive(lk)) throw ConfigError("gains.lk must be positive");
  if (!(z_floor > 0.0)) throw ConfigError("gains.z_floor must be positive");
  if (!(sigma_floor > 0.0)) throw ConfigError("gains.sigma_floor must be positive");
  if (!(damping_threshold > 0.0)) throw ConfigError("gains.damping_threshold must be positive");
}

std::string to_string(IntentSource s) {
  switch (s) {
    case IntentSource::slider: return "slider";
    case IntentSource::cartesian_drag: return "cartesian_drag";
    case IntentSource::scripted: return "scripted";
    case IntentSource::none: break;
  }
  return "none";
}

TaskTerm task_term(const JacobianBundle& bundle, const EstimatorState& est, const Vec2& x,
                   const Vec2& x_d, const Vec3& r, const ControllerConfig& cfg) {
  TaskTerm t;
  t.z_hat = estimate_depth(est, r, cfg.z_floor);
  t.js = estimate_image_jacobian(est, x, cfg.sigma_floor);
  const Vec2 e = x - x_d;
  const Vec3 r_dot_cmd = t.js.Js_pinv * cfg.kp.cwiseProduct(e);
  t.u_T = -t.z_hat.value * (bundle.J_pinv * r_dot_cmd);
  return t;
}

EstimatorState adapt_step(const EstimatorState& est, const Vec2& x_dot, const Vec3& r_dot,
                          const Vec2& x, const Vec2& x_d, const Vec3& r,
                          const ControllerConfig& cfg, double dt) {
  if (!cfg.adaptation_enabled) return est;
  if (!(dt > 0.0)) throw ConfigError("adapt_step: dt must be positive");
  const Vec2 e = x - x_d;
  const double z_hat = estimate_depth(est, r, cfg.z_floor).value;
  const auto layout = layout_for_count(est.theta_k.size());
  if (cfg.lk.size() != est.theta_k.size()) {
    throw ConfigError("gains.lk size does not match theta_k");
  }

  EstimatorState next = est;
  const Vec4 grad_z = regressor_yz(x_dot, r).transpose() * e;
  next.theta_z -= (dt / z_hat) * cfg.lz.cwiseProduct(grad_z);
  const VecX grad_k = regressor_yk(r_dot, x, layout).transpose() * e;
  next.theta_k += (dt / z_hat) * cfg.lk.cwiseProduct(grad_k);
  return next;
}

VecX nullspace_term(const JacobianBundle& bundle, const VecX& d, const ControllerConfig& cfg) {
  if (d.size() != bundle.N.cols()) {
    throw ConfigError("intent has " + std::to_string(d.size()) + " entries, expected " +
                      std::to_string(bundle.N.cols()));
  }
  return bundle.N * (d / cfg.cd);
}

VecX control_law(const RobotModel& robot, const VecX& q, const Vec2& x, const Vec2& x_d,
                 const VecX& d, const EstimatorState& est, const ControllerConfig& cfg) {
  const JacobianBundle bundle = make_bundle(robot, q, cfg.damping_threshold);
  const Vec3 r = forward_kinematics(robot, q);
  return task_term(bundle, est, x, x_d, r, cfg).u_T + nullspace_term(bundle, d, cfg);
}

ControlStep control_step(const RobotModel& robot, const VecX& q, const Vec2& x, const Vec2& x_d,
                         const VecX& d, const EstimatorState& est, const ControllerConfig& cfg,
                         const MeasuredRates& rates, double dt) {
  require_finite("joint state", q.allFinite());
  require_finite("pixel measurement", x.allFinite() && x_d.allFinite());
  require_finite("intent", d.allFinite());
  require_finite("parameter estimate", est.theta_z.allFinite() && est.theta_k.allFinite());
  require_finite("measured rates", rates.x_dot.allFinite() && rates.r_dot.allFinite());

  const JacobianBundle bundle = make_bundle(robot, q, cfg.damping_threshold);
  const Vec3 r = forward_kinematics(robot, q);
  TaskTerm task = task_term(bundle, est, x, x_d, r, cfg);

  ControlStep step;
  ControlOutput& out = step.out;
  out.u_T = std::move(task.u_T);
  out.u_N = nullspace_term(bundle, d, cfg);
  out.u = out.u_T + out.u_N;
  out.e = x - x_d;
  out.z_hat = task.z_hat.value;
  out.z_clamped = task.z_hat.clamped;
  out.js_damped = task.js.damped;
  out.j_damped = bundle.damped;
  out.sigma_min = bundle.sigma_min;
  out.null_residual = (bundle.N * (cfg.cd * out.u - d)).norm();
  require_finite("control output", out.u.allFinite());

  step.next = adapt_step(est, rates.x_dot, rates.r_dot, x, x_d, r, cfg, dt);
  require_finite("adapted estimate", step.next.theta_z.allFinite() && step.next.theta_k.allFinite());
  return step;
}

double lyapunov_value(const Vec2& e, const EstimatorState& est, const TrueParams& truth,
                      const ControllerConfig& cfg) {
  const Vec4 dz = truth.theta_z - est.theta_z;
  const VecX dk = truth.theta_k - est.theta_k;
  return 0.5 * e.squaredNorm() + 0.5 * dk.cwiseQuotient(cfg.lk).dot(dk) +
         0.5 * dz.cwiseQuotient(cfg.lz).dot(dz);
}

}  // namespace nsvs
