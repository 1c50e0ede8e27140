#include "nsvs/simulator.hpp"

#include <cmath>

#include "nsvs/errors.hpp"

namespace nsvs {
namespace {

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

struct DesiredVisitor {
  double t;
  Vec2 operator()(const SetpointTarget& s) const { return s.point; }
  Vec2 operator()(const CircleTarget& c) const {
    const double phase = c.rate * std::max(t - c.t0, 0.0);
    return c.center + c.radius * Vec2(std::cos(phase), std::sin(phase));
  }
};

}  // namespace

Vec2 desired_pixel(const TargetSpec& target, double t) {
  return std::visit(DesiredVisitor{t}, target);
}

VecX IntentSchedule::at(double t, int dof) const {
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    if (t >= it->t_start && t < it->t_end) {
      if (it->d.size() != dof) {
        throw ConfigError("intent segment has " + std::to_string(it->d.size()) +
                          " entries, robot has " + std::to_string(dof) + " joints");
      }
      return it->d;
    }
  }
  return VecX::Zero(dof);
}

std::string to_string(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

Integrator integrator_from_string(const std::string& s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk4") return Integrator::rk4;
  throw ConfigError("unknown integrator '" + s + "'");
}

std::int64_t SimConfig::step_count() const {
  // Tolerate duration/dt landing a hair below an integer.
  return static_cast<std::int64_t>(std::floor(duration / dt + 1e-9));
}

Simulator::Simulator(SimSetup setup)
    : setup_(std::move(setup)),
      truth_(true_params(setup_.camera, layout_for_count(setup_.est0.theta_k.size()))),
      target_(setup_.target) {
  if (setup_.q0.size() != setup_.robot.dof()) {
    throw ConfigError("initial q has wrong length");
  }
  if (!(setup_.sim.dt > 0.0)) throw ConfigError("sim.dt must be positive");
  setup_.controller.validate();
  reset();
}

void Simulator::reset() {
  state_ = SimState{};
  state_.q = setup_.q0;
  state_.est = setup_.est0;
  noise_rng_.seed(setup_.sim.seed ^ kNoiseStream);
  target_ = setup_.target;
}

Vec2 Simulator::measure(const Vec2& x_exact) {
  Vec2 x = x_exact;
  if (setup_.noise.amplitude > 0.0) {
    std::uniform_real_distribution<double> dist(-setup_.noise.amplitude, setup_.noise.amplitude);
    x[0] += dist(noise_rng_);
    x[1] += dist(noise_rng_);
  }
  if (setup_.noise.quantize) {
    x = x.array().round().matrix();
  }
  return x;
}

VecX Simulator::derivative(const VecX& q, const Vec2& x_d, const VecX& d,
                           const EstimatorState& est) const {
  const Vec3 r = forward_kinematics(setup_.robot, q);
  const Vec2 x = project(setup_.camera, r).x;
  return control_law(setup_.robot, q, x, x_d, d, est, setup_.controller);
}

TelemetryRecord Simulator::step(const VecX& d) {
  const double dt = setup_.sim.dt;
  const double t = time();
  const Vec3 r = forward_kinematics(setup_.robot, state_.q);
  const Projection proj = project(setup_.camera, r);
  const Vec2 x = measure(proj.x);

  MeasuredRates rates;
  if (state_.has_prev) {
    rates.x_dot = (x - state_.x_prev) / dt;
    rates.r_dot = (r - state_.r_prev) / dt;
  }
  const Vec2 x_d = desired_pixel(target_, t);
  const ControlStep cs = control_step(setup_.robot, state_.q, x, x_d, d, state_.est,
                                      setup_.controller, rates, dt);

  TelemetryRecord rec;
  rec.step = state_.step;
  rec.t = t;
  rec.q = state_.q;
  rec.r = r;
  rec.x = x;
  rec.x_d = x_d;
  rec.e = cs.out.e;
  rec.d = d;
  rec.u = cs.out.u;
  rec.u_T = cs.out.u_T;
  rec.u_N = cs.out.u_N;
  rec.z_hat = cs.out.z_hat;
  rec.z_true = proj.z;
  rec.V = lyapunov_value(cs.out.e, state_.est, truth_, setup_.controller);
  rec.null_residual = cs.out.null_residual;
  rec.sigma_min = cs.out.sigma_min;
  rec.z_clamped = cs.out.z_clamped;
  rec.j_damped = cs.out.j_damped;
  rec.js_damped = cs.out.js_damped;
  rec.est = state_.est;

  const double peak_rate = cs.out.u.cwiseAbs().maxCoeff();
  if (peak_rate > setup_.sim.max_joint_rate) {
    throw DivergenceError("joint rate " + std::to_string(peak_rate) + " rad/s exceeds " +
                          std::to_string(setup_.sim.max_joint_rate) + " at t=" +
                          std::to_string(t));
  }

  VecX q_next;
  if (setup_.sim.integrator == Integrator::euler) {
    q_next = state_.q + dt * cs.out.u;
  } else {
    // Control law re-evaluated at the stages; d, x_d and theta_hat held.
    const VecX& k1 = cs.out.u;
    const VecX k2 = derivative(state_.q + 0.5 * dt * k1, x_d, d, state_.est);
    const VecX k3 = derivative(state_.q + 0.5 * dt * k2, x_d, d, state_.est);
    const VecX k4 = derivative(state_.q + dt * k3, x_d, d, state_.est);
    q_next = state_.q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!q_next.allFinite()) {
    throw IntegrityError("non-finite joint state at t=" + std::to_string(t + dt));
  }

  state_.q = std::move(q_next);
  state_.est = cs.next;
  state_.x_prev = x;
  state_.r_prev = r;
  state_.has_prev = true;
  ++state_.step;
  return rec;
}

}  // namespace nsvs
