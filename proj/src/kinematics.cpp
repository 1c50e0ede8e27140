#include "nsvs/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "nsvs/errors.hpp"

namespace nsvs {
namespace {

void check_q(const RobotModel& model, const VecX& q) {
  if (q.size() != model.dof()) {
    throw ConfigError("joint vector has " + std::to_string(q.size()) + " entries, robot '" +
                      model.name + "' has " + std::to_string(model.dof()) + " joints");
  }
  if (!q.allFinite()) {
    throw ConfigError("joint vector contains non-finite entries");
  }
}

}  // namespace

RobotModel ur5_preset() {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  RobotModel m;
  m.name = "ur5";
  m.joints = {
      {0.089159, 0.0, kHalfPi, 0.0},
      {0.0, -0.425, 0.0, 0.0},
      {0.0, -0.39225, 0.0, 0.0},
      {0.10915, 0.0, kHalfPi, 0.0},
      {0.09465, 0.0, -kHalfPi, 0.0},
      {0.0823, 0.0, 0.0, 0.0},
  };
  return m;
}

VecX ur5_home_pose() {
  VecX q(6);
  q << 0.2, -1.3, 1.7, -1.9, -1.57, 0.0;
  return q;
}

RobotModel planar3r_preset() {
  RobotModel m;
  m.name = "planar3r";
  m.joints = {{0.0, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
  return m;
}

RobotModel robot_preset(const std::string& name) {
  if (name == "ur5") return ur5_preset();
  if (name == "planar3r") return planar3r_preset();
  throw ConfigError("unknown robot preset '" + name + "'");
}

Transform dh_transform(const DhRow& row, double q) {
  const double theta = q + row.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Transform T;
  T << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       0.0, sa, ca, row.d,
       0.0, 0.0, 0.0, 1.0;
  return T;
}

std::vector<Transform> link_frames(const RobotModel& model, const VecX& q) {
  check_q(model, q);
  std::vector<Transform> frames;
  frames.reserve(model.joints.size() + 1);
  frames.push_back(Transform::Identity());
  for (int i = 0; i < model.dof(); ++i) {
    frames.push_back(frames.back() * dh_transform(model.joints[i], q[i]));
  }
  return frames;
}

Vec3 forward_kinematics(const RobotModel& model, const VecX& q) {
  const Transform& T = link_frames(model, q).back();
  return T.topLeftCorner<3, 3>() * model.feature_offset + T.topRightCorner<3, 1>();
}

Mat3X jacobian(const RobotModel& model, const VecX& q) {
  const auto frames = link_frames(model, q);
  const Transform& Te = frames.back();
  const Vec3 r = Te.topLeftCorner<3, 3>() * model.feature_offset + Te.topRightCorner<3, 1>();
  Mat3X J(3, model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const Vec3 axis = frames[i].block<3, 1>(0, 2);
    const Vec3 origin = frames[i].block<3, 1>(0, 3);
    J.col(i) = axis.cross(r - origin);
  }
  return J;
}

Vec3 joint_origin(const RobotModel& model, const VecX& q, int joint_index) {
  if (joint_index < 1 || joint_index > model.dof()) {
    throw ConfigError("joint index " + std::to_string(joint_index) + " out of range 1.." +
                      std::to_string(model.dof()));
  }
  return link_frames(model, q)[joint_index - 1].block<3, 1>(0, 3);
}

Mat3X joint_origin_jacobian(const RobotModel& model, const VecX& q, int joint_index) {
  if (joint_index < 1 || joint_index > model.dof()) {
    throw ConfigError("joint index " + std::to_string(joint_index) + " out of range 1.." +
                      std::to_string(model.dof()));
  }
  const auto frames = link_frames(model, q);
  const Vec3 p = frames[joint_index - 1].block<3, 1>(0, 3);
  Mat3X J(3, joint_index);
  for (int i = 0; i < joint_index; ++i) {
    const Vec3 axis = frames[i].block<3, 1>(0, 2);
    const Vec3 origin = frames[i].block<3, 1>(0, 3);
    J.col(i) = axis.cross(p - origin);
  }
  J.col(joint_index - 1).setZero();
  return J;
}

PseudoInverse pseudo_inverse(const MatX& J, double damping_threshold) {
  if (J.size() == 0 || J.cwiseAbs().maxCoeff() == 0.0) {
    throw SingularityError("pseudo-inverse of an all-zero matrix");
  }
  if (!J.allFinite()) {
    throw IntegrityError("pseudo-inverse of a matrix with non-finite entries");
  }
  Eigen::JacobiSVD<MatX> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();  // descending, length min(rows, cols)
  PseudoInverse out;
  out.sigma_min = s[s.size() - 1];
  out.damped = out.sigma_min < damping_threshold;

  VecX s_inv(s.size());
  const double lambda2 = damping_threshold * damping_threshold;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s_inv[i] = out.damped ? s[i] / (s[i] * s[i] + lambda2) : 1.0 / s[i];
  }
  out.pinv = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

MatX null_projector(const MatX& J, const MatX& J_pinv) {
  if (J_pinv.rows() != J.cols() || J_pinv.cols() != J.rows()) {
    throw ConfigError("null_projector: J and J_pinv shapes are inconsistent");
  }
  return MatX::Identity(J.cols(), J.cols()) - J_pinv * J;
}

JacobianBundle make_bundle(const Mat3X& J, double damping_threshold) {
  JacobianBundle b;
  b.J = J;
  auto pi = pseudo_inverse(J, damping_threshold);
  b.J_pinv = std::move(pi.pinv);
  b.sigma_min = pi.sigma_min;
  b.damped = pi.damped;
  b.N = null_projector(b.J, b.J_pinv);
  return b;
}

JacobianBundle make_bundle(const RobotModel& model, const VecX& q, double damping_threshold) {
  return make_bundle(jacobian(model, q), damping_threshold);
}

}  // namespace nsvs
