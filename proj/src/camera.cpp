#include "nsvs/camera.hpp"

#include "nsvs/errors.hpp"

namespace nsvs {

CameraModel look_at_camera(const Vec3& eye, const Vec3& target, double focal_px, int width,
                           int height, double scale) {
  Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) {
    throw ConfigError("look_at_camera: viewing direction is parallel to world z");
  }
  right.normalize();
  const Vec3 down = forward.cross(right);

  Eigen::Matrix3d R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();
  const Vec3 t = -R * eye;

  Eigen::Matrix3d K;
  K << focal_px, 0.0, 0.5 * width,
       0.0, focal_px, 0.5 * height,
       0.0, 0.0, 1.0;

  Projection34 Rt;
  Rt.leftCols<3>() = R;
  Rt.col(3) = t;

  CameraModel cam;
  cam.P = scale * K * Rt;
  cam.width = width;
  cam.height = height;
  return cam;
}

CameraModel desk_camera_preset() {
  // Frames a point 0.25 m up and to the side of the UR5 home-pose feature,
  // seen from 1.3 m.
  const Vec3 focus = forward_kinematics(ur5_preset(), ur5_home_pose()) + Vec3(0.0, 0.15, 0.2);
  const Vec3 view_dir = Vec3(-1.1, 0.6, 0.5).normalized();
  return look_at_camera(focus + 1.3 * view_dir, focus, 1000.0, 1440, 1080, 5.0);
}

int param_count(ParamLayout layout) {
  return layout == ParamLayout::shared_depth_row ? 9 : 12;
}

ParamLayout layout_for_count(Eigen::Index n_k) {
  if (n_k == 9) return ParamLayout::shared_depth_row;
  if (n_k == 12) return ParamLayout::per_row;
  throw ConfigError("theta_k must have 9 or 12 entries, got " + std::to_string(n_k));
}

std::string to_string(ParamLayout layout) {
  return layout == ParamLayout::shared_depth_row ? "shared_depth_row" : "per_row";
}

ParamLayout param_layout_from_string(const std::string& s) {
  if (s == "shared_depth_row") return ParamLayout::shared_depth_row;
  if (s == "per_row") return ParamLayout::per_row;
  throw ConfigError("unknown parameterization '" + s + "'");
}

TrueParams true_params(const CameraModel& cam, ParamLayout layout) {
  TrueParams tp;
  tp.theta_z << cam.a(), cam.b();
  const Mat23 M = cam.M();
  const Vec3 a = cam.a();
  tp.theta_k.resize(param_count(layout));
  if (layout == ParamLayout::shared_depth_row) {
    tp.theta_k << M.row(0).transpose(), M.row(1).transpose(), a;
  } else {
    tp.theta_k << M.row(0).transpose(), a, M.row(1).transpose(), a;
  }
  return tp;
}

Projection project(const CameraModel& cam, const Vec3& r, double min_depth) {
  const double z = cam.a().dot(r) + cam.b();
  if (!(z > min_depth)) {
    throw BehindCameraError("feature depth " + std::to_string(z) + " is not above " +
                            std::to_string(min_depth));
  }
  return {(cam.M() * r + cam.m4()) / z, z};
}

Mat23 true_image_jacobian(const CameraModel& cam, const Vec3& r, double min_depth) {
  const Vec2 x = project(cam, r, min_depth).x;
  return cam.M() - x * cam.a().transpose();
}

Eigen::Matrix<double, 2, 4> regressor_yz(const Vec2& x_dot, const Vec3& r) {
  Vec4 rh;
  rh << r, 1.0;
  return x_dot * rh.transpose();
}

Eigen::Matrix<double, 2, Eigen::Dynamic> regressor_yk(const Vec3& r_dot, const Vec2& x,
                                                      ParamLayout layout) {
  Eigen::Matrix<double, 2, Eigen::Dynamic> Y =
      Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, param_count(layout));
  const Eigen::RowVector3d rd = r_dot.transpose();
  if (layout == ParamLayout::shared_depth_row) {
    Y.block<1, 3>(0, 0) = rd;
    Y.block<1, 3>(1, 3) = rd;
    Y.block<1, 3>(0, 6) = -x[0] * rd;
    Y.block<1, 3>(1, 6) = -x[1] * rd;
  } else {
    Y.block<1, 3>(0, 0) = rd;
    Y.block<1, 3>(0, 3) = -x[0] * rd;
    Y.block<1, 3>(1, 6) = rd;
    Y.block<1, 3>(1, 9) = -x[1] * rd;
  }
  return Y;
}

DepthEstimate estimate_depth(const EstimatorState& est, const Vec3& r, double z_floor) {
  DepthEstimate out;
  out.raw = est.theta_z.head<3>().dot(r) + est.theta_z[3];
  out.clamped = !(out.raw >= z_floor);
  out.value = out.clamped ? z_floor : out.raw;
  return out;
}

ImageJacobianEstimate estimate_image_jacobian(const EstimatorState& est, const Vec2& x,
                                              double sigma_floor) {
  const ParamLayout layout = layout_for_count(est.theta_k.size());
  const VecX& th = est.theta_k;
  ImageJacobianEstimate out;
  if (layout == ParamLayout::shared_depth_row) {
    const Vec3 a = th.segment<3>(6);
    out.Js.row(0) = (th.segment<3>(0) - x[0] * a).transpose();
    out.Js.row(1) = (th.segment<3>(3) - x[1] * a).transpose();
  } else {
    out.Js.row(0) = (th.segment<3>(0) - x[0] * th.segment<3>(3)).transpose();
    out.Js.row(1) = (th.segment<3>(6) - x[1] * th.segment<3>(9)).transpose();
  }
  try {
    auto pi = pseudo_inverse(out.Js, sigma_floor);
    out.Js_pinv = pi.pinv;
    out.sigma_min = pi.sigma_min;
    out.damped = pi.damped;
  } catch (const SingularityError&) {
    out.Js_pinv.setZero();
    out.sigma_min = 0.0;
    out.damped = true;
  }
  return out;
}

}  // namespace nsvs
