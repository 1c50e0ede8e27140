#include <doctest.h>

#include <numbers>

#include "nsvs/errors.hpp"
#include "nsvs/kinematics.hpp"
#include "oracles.hpp"

using namespace nsvs;

namespace {

VecX vec(std::initializer_list<double> v) {
  VecX out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

VecX random_q(std::mt19937_64& rng, int n) { return oracle::random_vector(rng, n, -3.0, 3.0); }

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("planar chain forward kinematics") {
  const RobotModel arm = planar3r_preset();
  CHECK((forward_kinematics(arm, vec({0, 0, 0})) - Vec3(3, 0, 0)).norm() < 1e-15);
  CHECK((forward_kinematics(arm, vec({std::numbers::pi / 2, 0, 0})) - Vec3(0, 3, 0)).norm() < 1e-15);

  const VecX q = vec({0.3, -0.2, 0.7});
  CHECK((forward_kinematics(arm, q) - oracle::forward_kinematics(arm, q)).norm() < 1e-12);
}

TEST_CASE("forward kinematics matches the transform-product oracle") {
  std::mt19937_64 rng(11);
  RobotModel ur5 = ur5_preset();
  ur5.feature_offset = Vec3(0.01, -0.02, 0.05);
  for (int i = 0; i < 200; ++i) {
    const VecX q = random_q(rng, 6);
    CHECK((forward_kinematics(ur5, q) - oracle::forward_kinematics(ur5, q)).norm() < 1e-12);
  }
}

TEST_CASE("planar jacobian at zero") {
  Mat3X expected(3, 3);
  expected << 0, 0, 0,
              3, 2, 1,
              0, 0, 0;
  const Mat3X J = jacobian(planar3r_preset(), VecX::Zero(3));
  CHECK((J - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((oracle::fd_jacobian(planar3r_preset(), VecX::Zero(3)) - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("jacobian agrees with finite differences") {
  std::mt19937_64 rng(12);
  const RobotModel ur5 = ur5_preset();
  for (int i = 0; i < 200; ++i) {
    const VecX q = random_q(rng, 6);
    const Mat3X J = jacobian(ur5, q);
    CHECK((J - oracle::fd_jacobian(ur5, q)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((J * VecX::Zero(6)).norm() == 0.0);
  }
}

TEST_CASE("joint origins") {
  const RobotModel arm = planar3r_preset();
  CHECK((joint_origin(arm, VecX::Zero(3), 1) - Vec3::Zero()).norm() < 1e-15);
  CHECK((joint_origin(arm, VecX::Zero(3), 2) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(joint_origin(arm, VecX::Zero(3), 0), ConfigError);
  CHECK_THROWS_AS(joint_origin(arm, VecX::Zero(3), 4), ConfigError);

  // The origin Jacobian differentiates joint_origin.
  std::mt19937_64 rng(13);
  const RobotModel ur5 = ur5_preset();
  const VecX q = random_q(rng, 6);
  for (int j = 1; j <= 6; ++j) {
    const Mat3X Jj = joint_origin_jacobian(ur5, q, j);
    REQUIRE(Jj.cols() == j);
    for (int i = 0; i < j; ++i) {
      VecX qp = q, qm = q;
      qp[i] += 1e-6;
      qm[i] -= 1e-6;
      const Vec3 fd = (joint_origin(ur5, qp, j) - joint_origin(ur5, qm, j)) / 2e-6;
      CHECK((Jj.col(i) - fd).norm() < 1e-6);
    }
  }
}

TEST_CASE("pseudo-inverse") {
  SUBCASE("orthonormal rows") {
    MatX J = MatX::Zero(3, 6);
    J.leftCols(3).setIdentity();
    const PseudoInverse p = pseudo_inverse(J, 1e-6);
    MatX expected = MatX::Zero(6, 3);
    expected.topRows(3).setIdentity();
    CHECK((p.pinv - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_FALSE(p.damped);
  }
  SUBCASE("random full rank agrees with the normal-equation form") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 100; ++i) {
      const MatX J = oracle::random_vector(rng, 18, -1, 1).reshaped(3, 6);
      const PseudoInverse p = pseudo_inverse(J, 1e-6);
      CHECK((J * p.pinv - MatX::Identity(3, 3)).norm() < 1e-9);
      CHECK((p.pinv - oracle::right_pinv(J)).norm() < 1e-9);
    }
  }
  SUBCASE("rank deficient input is damped and finite") {
    MatX J(3, 6);
    J.row(0) << 1, 2, 3, 4, 5, 6;
    J.row(1) = 2.0 * J.row(0);
    J.row(2) << 0, 1, 0, 1, 0, 1;
    const PseudoInverse p = pseudo_inverse(J, 1e-6);
    CHECK(p.damped);
    CHECK(p.pinv.allFinite());
  }
  SUBCASE("all-zero input") {
    CHECK_THROWS_AS(pseudo_inverse(MatX::Zero(3, 6), 1e-6), SingularityError);
  }
}

TEST_CASE("null-space projector") {
  MatX J(1, 3);
  J << 1, 0, 0;
  const PseudoInverse p = pseudo_inverse(J, 1e-6);
  const MatX N = null_projector(J, p.pinv);
  CHECK((N - Vec3(0, 1, 1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(15);
  const RobotModel ur5 = ur5_preset();
  for (int i = 0; i < 100; ++i) {
    const JacobianBundle b = make_bundle(ur5, random_q(rng, 6), 1e-6);
    if (b.damped) continue;
    CHECK((b.N * b.N - b.N).norm() < 1e-9);
    CHECK((b.J * b.N).norm() < 1e-9);
    CHECK((b.N * b.J_pinv).norm() < 1e-9);
    CHECK((b.N - b.N.transpose()).norm() < 1e-9);
  }
}

TEST_CASE("joint vector length is checked") {
  CHECK_THROWS_AS(forward_kinematics(ur5_preset(), VecX::Zero(5)), ConfigError);
  CHECK_THROWS_AS(robot_preset("scara"), ConfigError);
}

}
