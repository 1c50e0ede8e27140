#pragma once

#include <cstdint>
#include <string>

#include "nsvs/kinematics.hpp"

namespace nsvs {

using Projection34 = Eigen::Matrix<double, 3, 4>;

/// Ground-truth pinhole camera. Row 3 of P is the depth row: z(r) = a.r + b.
struct CameraModel {
  Projection34 P = Projection34::Zero();
  int width = 1440;
  int height = 1080;

  Mat23 M() const { return P.topLeftCorner<2, 3>(); }
  Vec2 m4() const { return P.topRightCorner<2, 1>(); }
  Vec3 a() const { return P.block<1, 3>(2, 0).transpose(); }
  double b() const { return P(2, 3); }
};

/// Builds P = scale * K [R | t] for a camera at `eye` looking at `target`
/// (world z up), focal length `focal_px`, principal point at the image centre.
CameraModel look_at_camera(const Vec3& eye, const Vec3& target, double focal_px, int width,
                           int height, double scale);

/// Eye-to-hand desk camera used by the bundled scenarios, framing the UR5
/// preset so its home pose appears in the lower-right of a 1440x1080 image.
CameraModel desk_camera_preset();

/// How theta_k is laid out.
///   shared_depth_row (n_k = 9):  (M row 1, M row 2, a)
///   per_row          (n_k = 12): (M row 1, a, M row 2, a)  with a separate copy
///                                of the depth row estimated for each pixel row
enum class ParamLayout { shared_depth_row, per_row };

int param_count(ParamLayout layout);
ParamLayout layout_for_count(Eigen::Index n_k);  // throws ConfigError
std::string to_string(ParamLayout layout);
ParamLayout param_layout_from_string(const std::string& s);  // throws ConfigError

/// True parameter vectors. Visible to the harness, never to the controller.
struct TrueParams {
  Vec4 theta_z;  // (a, b)
  VecX theta_k;
};

TrueParams true_params(const CameraModel& cam, ParamLayout layout = ParamLayout::shared_depth_row);

struct EstimatorState {
  Vec4 theta_z = Vec4::Zero();
  VecX theta_k;
};

struct Projection {
  Vec2 x;    // pixels
  double z;  // depth
};

/// x = (M r + m4) / z with z = a.r + b. Throws BehindCameraError if z <= min_depth.
Projection project(const CameraModel& cam, const Vec3& r, double min_depth = 0.0);

/// J_s = M - x a^T, satisfying z xdot = J_s rdot.
Mat23 true_image_jacobian(const CameraModel& cam, const Vec3& r, double min_depth = 0.0);

/// Y_z = x_dot [r^T 1]; Y_z theta_z = z(r) x_dot.
Eigen::Matrix<double, 2, 4> regressor_yz(const Vec2& x_dot, const Vec3& r);

/// Y_k(r_dot, x); Y_k theta_k = J_s r_dot when x is the measured pixel.
Eigen::Matrix<double, 2, Eigen::Dynamic> regressor_yk(const Vec3& r_dot, const Vec2& x,
                                                      ParamLayout layout = ParamLayout::shared_depth_row);

struct DepthEstimate {
  double value = 0.0;
  double raw = 0.0;
  bool clamped = false;
};

/// z_hat = max(theta_z_hat . [r 1], z_floor).
DepthEstimate estimate_depth(const EstimatorState& est, const Vec3& r, double z_floor);

struct ImageJacobianEstimate {
  Mat23 Js = Mat23::Zero();
  Mat32 Js_pinv = Mat32::Zero();
  double sigma_min = 0.0;
  bool damped = false;
};

/// Reconstructs J_s_hat row-wise as M_hat_i - x_i a_hat_i^T and pseudo-inverts
/// it, damped below sigma_floor. An all-zero estimate yields a zero inverse.
ImageJacobianEstimate estimate_image_jacobian(const EstimatorState& est, const Vec2& x,
                                              double sigma_floor);

}  // namespace nsvs
