#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nsvs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using MatX = Eigen::MatrixXd;
using Transform = Eigen::Matrix4d;

/// Task dimension: the tracked feature is a Cartesian point.
inline constexpr int kTaskDim = 3;

/// One revolute joint in standard DH form:
///   A_i = Rot_z(q_i + theta_offset) * Trans_z(d) * Trans_x(a) * Rot_x(alpha)
struct DhRow {
  double d = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double theta_offset = 0.0;
};

struct RobotModel {
  std::string name;
  std::vector<DhRow> joints;
  Vec3 feature_offset = Vec3::Zero();  // in the end-effector frame [m]

  int dof() const { return static_cast<int>(joints.size()); }
  bool is_redundant() const { return dof() > kTaskDim; }
};

/// UR5-like 6-DOF arm (standard DH, meters).
RobotModel ur5_preset();

/// Start configuration used by the bundled scenarios.
VecX ur5_home_pose();

/// Planar 3R chain with unit links, all axes along base z.
RobotModel planar3r_preset();

/// Looks a preset up by name ("ur5", "planar3r"); throws ConfigError.
RobotModel robot_preset(const std::string& name);

/// Homogeneous transform of a single DH row at joint angle q.
Transform dh_transform(const DhRow& row, double q);

/// Base-frame transforms T_0..T_n; T_0 is identity, T_i the frame after joint i.
std::vector<Transform> link_frames(const RobotModel& model, const VecX& q);

/// Feature point position in the base frame, r = h(q).
Vec3 forward_kinematics(const RobotModel& model, const VecX& q);

/// Position Jacobian of the feature point (3 x n).
Mat3X jacobian(const RobotModel& model, const VecX& q);

/// Origin of joint j (1-based), i.e. the origin of frame j-1.
Vec3 joint_origin(const RobotModel& model, const VecX& q, int joint_index);

/// Position Jacobian of joint j's origin with respect to joints 1..j (3 x j).
/// Column j is identically zero.
Mat3X joint_origin_jacobian(const RobotModel& model, const VecX& q, int joint_index);

struct PseudoInverse {
  MatX pinv;
  double sigma_min = 0.0;
  bool damped = false;
};

/// Moore-Penrose inverse via SVD when the smallest singular value is at least
/// `damping_threshold`; otherwise damped least squares J^T (J J^T + l^2 I)^-1
/// with l = damping_threshold. Works for any shape. Throws SingularityError for
/// an all-zero (or empty) matrix.
PseudoInverse pseudo_inverse(const MatX& J, double damping_threshold);

/// N = I - J^+ J.
MatX null_projector(const MatX& J, const MatX& J_pinv);

struct JacobianBundle {
  Mat3X J;
  MatX J_pinv;  // n x 3
  MatX N;       // n x n
  double sigma_min = 0.0;
  bool damped = false;
};

JacobianBundle make_bundle(const RobotModel& model, const VecX& q, double damping_threshold);

/// Builds a bundle from an explicit Jacobian (used by toy examples and tests).
JacobianBundle make_bundle(const Mat3X& J, double damping_threshold);

}  // namespace nsvs
