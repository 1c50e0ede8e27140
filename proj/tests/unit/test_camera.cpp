#include <doctest.h>

#include "nsvs/camera.hpp"
#include "nsvs/errors.hpp"
#include "oracles.hpp"

using namespace nsvs;

namespace {

CameraModel camera_from(const Projection34& P) {
  CameraModel cam;
  cam.P = P;
  return cam;
}

CameraModel unit_camera() {
  Projection34 P;
  P << 1, 0, 0, 0,
       0, 1, 0, 0,
       0, 0, 0, 1;
  return camera_from(P);
}

Vec3 random_point(std::mt19937_64& rng) { return oracle::random_vector(rng, 3, -1, 1); }

}  // namespace

TEST_SUITE("camera") {

TEST_CASE("projection examples") {
  const Projection p = project(unit_camera(), Vec3(2, 5, 9));
  CHECK(p.z == 1.0);
  CHECK(p.x == Vec2(2, 5));

  Projection34 P;
  P << 500, 0, 0, 720,
       0, 500, 0, 540,
       0, 0, 1, 2;
  const Projection q = project(camera_from(P), Vec3::Zero());
  CHECK(q.z == 2.0);
  CHECK((q.x - Vec2(360, 270)).norm() < 1e-12);
}

TEST_CASE("projection is invariant to the scale of P") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Projection34 P = oracle::random_camera(rng);
    const Vec3 r = random_point(rng);
    const Vec2 x = project(camera_from(P), r).x;
    CHECK((x - project(camera_from(3.7 * P), r).x).norm() < 1e-9);
    CHECK((x - oracle::project(P, r)).norm() < 1e-9);
  }
}

TEST_CASE("behind the camera") {
  Projection34 P = unit_camera().P;
  P(2, 3) = -1.0;
  CHECK_THROWS_AS(project(camera_from(P), Vec3::Zero()), BehindCameraError);
  CHECK_THROWS_AS(project(unit_camera(), Vec3::Zero(), 2.0), BehindCameraError);
}

TEST_CASE("image jacobian") {
  const Mat23 Js = true_image_jacobian(unit_camera(), Vec3(0.3, -0.4, 7.0));
  Mat23 expected;
  expected << 1, 0, 0,
              0, 1, 0;
  CHECK(Js == expected);

  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const Projection34 P = oracle::random_camera(rng);
    const Vec3 r = random_point(rng);
    const Vec3 r_dot = random_point(rng);
    const Mat23 J = true_image_jacobian(camera_from(P), r);
    CHECK((J * r_dot - oracle::fd_scaled_image_rate(P, r, r_dot)).norm() < 1e-6);
    CHECK((J * Vec3::Zero()).norm() == 0.0);
  }
}

TEST_CASE("depth regressor") {
  const auto Y = regressor_yz(Vec2(1, 0), Vec3::Zero());
  Eigen::Matrix<double, 2, 4> expected;
  expected << 0, 0, 0, 1,
              0, 0, 0, 0;
  CHECK(Y == expected);
  CHECK(regressor_yz(Vec2::Zero(), Vec3(1, 2, 3)).isZero(0.0));

  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const Projection34 P = oracle::random_camera(rng);
    const CameraModel cam = camera_from(P);
    const Vec3 r = random_point(rng);
    const Vec2 x_dot = oracle::random_vector(rng, 2, -50, 50);
    const Vec2 lhs = regressor_yz(x_dot, r) * true_params(cam).theta_z;
    CHECK((lhs - oracle::depth(P, r) * x_dot).norm() < 1e-9);
  }
}

TEST_CASE("image-jacobian regressor") {
  const auto Y = regressor_yk(Vec3(1, 0, 0), Vec2::Zero());
  Eigen::Matrix<double, 2, 9> expected = Eigen::Matrix<double, 2, 9>::Zero();
  expected(0, 0) = 1;
  expected(1, 3) = 1;
  CHECK(Y == expected);
  CHECK(regressor_yk(Vec3::Zero(), Vec2(3, 4)).isZero(0.0));
  CHECK(regressor_yk(Vec3::Zero(), Vec2(3, 4), ParamLayout::per_row).cols() == 12);

  std::mt19937_64 rng(24);
  for (ParamLayout layout : {ParamLayout::shared_depth_row, ParamLayout::per_row}) {
    for (int i = 0; i < 200; ++i) {
      const CameraModel cam = camera_from(oracle::random_camera(rng));
      const Vec3 r = random_point(rng);
      const Vec3 r_dot = random_point(rng);
      const Vec2 x = project(cam, r).x;
      const Vec2 lhs = regressor_yk(r_dot, x, layout) * true_params(cam, layout).theta_k;
      const Vec2 rhs = true_image_jacobian(cam, r) * r_dot;
      CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("parameter layouts") {
  CHECK(param_count(ParamLayout::shared_depth_row) == 9);
  CHECK(param_count(ParamLayout::per_row) == 12);
  CHECK(layout_for_count(12) == ParamLayout::per_row);
  CHECK_THROWS_AS(layout_for_count(10), ConfigError);
  CHECK(param_layout_from_string(to_string(ParamLayout::per_row)) == ParamLayout::per_row);
  CHECK_THROWS_AS(param_layout_from_string("full"), ConfigError);
}

TEST_CASE("depth estimate") {
  std::mt19937_64 rng(25);
  const CameraModel cam = camera_from(oracle::random_camera(rng));
  const Vec3 r = random_point(rng);

  EstimatorState exact;
  exact.theta_z = true_params(cam).theta_z;
  const DepthEstimate z = estimate_depth(exact, r, 0.05);
  CHECK(z.value == doctest::Approx(oracle::depth(cam.P, r)).epsilon(1e-14));
  CHECK_FALSE(z.clamped);

  EstimatorState zero;
  const DepthEstimate floor = estimate_depth(zero, r, 0.05);
  CHECK(floor.value == 0.05);
  CHECK(floor.clamped);

  EstimatorState est;
  est.theta_z = Vec4(0.1, -0.2, 0.3, 4.0);
  const double hand = 0.1 * r[0] - 0.2 * r[1] + 0.3 * r[2] + 4.0;
  CHECK(estimate_depth(est, r, 0.05).value == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("image-jacobian estimate") {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 50; ++i) {
    const CameraModel cam = camera_from(oracle::random_camera(rng));
    const Vec3 r = random_point(rng);
    const Vec2 x = project(cam, r).x;

    EstimatorState exact;
    exact.theta_k = true_params(cam).theta_k;
    const ImageJacobianEstimate js = estimate_image_jacobian(exact, x, 1e-6);
    CHECK((js.Js - true_image_jacobian(cam, r)).norm() < 1e-9 * js.Js.norm());
    CHECK((js.Js * js.Js_pinv - Eigen::Matrix2d::Identity()).norm() < 1e-9);

    EstimatorState guess;
    guess.theta_k = oracle::random_vector(rng, 9, -100, 100);
    const Vec3 r_dot = random_point(rng);
    const Vec2 a = estimate_image_jacobian(guess, x, 1e-6).Js * r_dot;
    const Vec2 b = regressor_yk(r_dot, x) * guess.theta_k;
    CHECK((a - b).norm() < 1e-12 * (1.0 + b.norm()));
  }

  EstimatorState zero;
  zero.theta_k = VecX::Zero(9);
  const ImageJacobianEstimate none = estimate_image_jacobian(zero, Vec2(10, 20), 1e-6);
  CHECK(none.Js.isZero(0.0));
  CHECK(none.damped);
  CHECK(none.Js_pinv.allFinite());
}

TEST_CASE("desk camera frames the home pose") {
  const CameraModel cam = desk_camera_preset();
  const Projection p = project(cam, forward_kinematics(ur5_preset(), ur5_home_pose()));
  CHECK(p.z > 0.0);
  CHECK(p.x[0] > 0.0);
  CHECK(p.x[0] < cam.width);
  CHECK(p.x[1] > 0.0);
  CHECK(p.x[1] < cam.height);
}

}
