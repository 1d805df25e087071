#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "hfm/hybrid_controller.hpp"
#include "test_util.hpp"

using namespace hfm;

namespace {

ProjectionPair pair_for(const Vec3& n) { return projections(frame_from_normal(n)); }

bool nonsingular(const RobotModel& m, const JointVector& q) {
  Eigen::JacobiSVD<Jacobian> svd(jacobians(m, q).position);
  return svd.singularValues().minCoeff() > 0.05;
}

}  // namespace

TEST_CASE("axis-aligned projections") {
  for (const Vec3& n : {Vec3(0, 0, 1), Vec3(0, 0, -1)}) {
    const ProjectionPair p = pair_for(n);
    CHECK(test::near(p.force, Vec3(0, 0, 1).asDiagonal().toDenseMatrix(), 0.0));
    CHECK(test::near(p.motion, Vec3(1, 1, 0).asDiagonal().toDenseMatrix(), 0.0));
  }
  ControlFrame zero;
  zero.normal = Vec3::Zero();
  zero.tangent.setZero();
  CHECK_THROWS_AS(projections(zero), DegenerateFrame);
}

TEST_CASE("both projector formulas agree") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const ControlFrame f = frame_from_normal(test::random_unit(rng));
    const ProjectionPair p = projections(f);
    const auto& T = f.tangent;
    const Mat3 motion_from_t = T * (T.transpose() * T).inverse() * T.transpose();
    CHECK(test::near(p.motion, motion_from_t, 1e-12));
    CHECK(test::near(Mat3(p.force + p.motion), Mat3::Identity(), 1e-12));
  }
}

TEST_CASE("control frame is orthonormal") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 n = test::random_unit(rng);
    const ControlFrame f = frame_from_normal(n);
    CHECK(f.normal == n);
    CHECK((n.transpose() * f.tangent).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(test::near(Eigen::Matrix2d(f.tangent.transpose() * f.tangent), Eigen::Matrix2d::Identity(), 1e-10));
  }
  const ControlFrame up = frame_from_normal(Vec3::UnitZ());
  CHECK(test::near(Vec3(up.tangent.col(0).cwiseAbs()), Vec3::UnitX(), 1e-15));
  CHECK(test::near(Vec3(up.tangent.col(1).cwiseAbs()), Vec3::UnitY(), 1e-15));
}

TEST_CASE("motion projector depends only on the tangent span") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    const ControlFrame f = frame_from_normal(test::random_unit(rng));
    const double a = std::uniform_real_distribution<double>(0, 6.3)(rng);
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Eigen::Matrix<double, 3, 2> T = f.tangent * r;
    const Mat3 m = T * (T.transpose() * T).inverse() * T.transpose();
    CHECK(test::near(m, projections(f).motion, 1e-12));
  }
}

TEST_CASE("force projector is continuous in the normal") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 n = test::random_unit(rng);
    const Vec3 axis = n.cross(test::random_unit(rng)).normalized();
    const double angle = std::uniform_real_distribution<double>(0, 0.999)(rng) * std::numbers::pi / 180;
    const Vec3 n2 = Eigen::AngleAxisd(angle, axis) * n;
    CHECK((pair_for(n).force - pair_for(n2).force).norm() < 0.05);
  }
}

TEST_CASE("projection algebra over random normals") {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProjectionPair p = pair_for(test::random_unit(rng));
    CHECK(test::near(Mat3(p.force * p.force), p.force, 1e-10));
    CHECK(test::near(Mat3(p.motion * p.motion), p.motion, 1e-10));
    CHECK(test::near(p.force, Mat3(p.force.transpose()), 1e-15));
    CHECK(Mat3(p.motion * p.force).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("admittance law") {
  const ControllerConfig cfg;
  const Vec3 f_des(0, 0, -2);
  CHECK(admittance_velocity(cfg, force_error(f_des, {0, 0, -2})) == Vec3::Zero());
  CHECK(test::near(admittance_velocity(cfg, force_error(f_des, Vec3::Zero())), Vec3(0, 0, -0.2), 1e-16));
  const Vec3 e(0.3, -1.2, 0.7);
  CHECK(admittance_velocity(cfg, 2 * e) == 2 * admittance_velocity(cfg, e));
}

TEST_CASE("precision term") {
  ControllerConfig cfg;
  const ProjectionPair p = pair_for(Vec3::UnitZ());
  CHECK(precision_term(cfg, p, Vec3::Zero(), Vec3::Zero()) == Vec3::Zero());
  const Vec3 e(0.001, -0.002, 0.003);
  CHECK(test::near(precision_term(cfg, p, e, e), Vec3(10 * e), 1e-16));
  cfg.k_f = Vec3::Zero();
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 n = test::random_unit(rng);
    const Vec3 x = test::random_unit(rng);
    CHECK(std::abs(n.dot(precision_term(cfg, pair_for(n), x, x))) < 1e-12);
  }
}

TEST_CASE("motion-force error removes the offset") {
  CHECK(test::near(motion_force_error({0.5, 0, 0.05}, {0.5, 0, 0}, {0, 0, 0.05}), Vec3::Zero(), 1e-17));
}

TEST_CASE("decoupled command subspaces") {
  const ProjectionPair p = pair_for(Vec3::UnitZ());
  const Vec3 v_des(0.01, -0.02, 0), v_adm(0, 0, -0.2);
  CHECK(test::near(cartesian_command(p, v_des, v_adm), Vec3(v_des + v_adm), 1e-17));
  // A normal component of v_des is annihilated, a tangential v_adm likewise.
  CHECK(test::near(cartesian_command(p, {0.01, 0, 0.5}, {0.3, 0, -0.2}), Vec3(0.01, 0, -0.2), 1e-17));
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const ProjectionPair q = pair_for(test::random_unit(rng));
    const Vec3 a = test::random_unit(rng), b = test::random_unit(rng);
    CHECK((q.motion * (q.force * a)).norm() < 1e-15);
    CHECK((q.force * (q.motion * b)).norm() < 1e-15);
  }
}

TEST_CASE("command realizes the Cartesian velocity and the projected split") {
  const RobotModel m = default_robot();
  ControllerConfig cfg;
  cfg.lambda = 0.0;
  std::mt19937_64 rng(68);
  std::normal_distribution<double> n(0, 1);
  int tested = 0;
  while (tested < 100) {
    const JointVector q = test::random_joints(rng);
    if (!nonsingular(m, q)) continue;
    ++tested;
    const ProjectionPair p = pair_for(test::random_unit(rng));
    const Vec3 v_des(n(rng), n(rng), n(rng)), v_adm(n(rng), n(rng), n(rng)), xi(n(rng), n(rng), n(rng));
    const Jacobian j = jacobians(m, q).position;
    const JointVector qd = command(m, q, cfg, p, v_des, v_adm, xi, JointVector::Zero());
    CHECK(test::near(Vec3(j * qd), Vec3(p.motion * v_des + p.force * v_adm + xi), 1e-8));

    // Motion and force parts separately, then summed.
    const JacobianPinv pinv = damped_pinv(j, 0.0);
    const JointVector qd_m = pinv * (p.motion * v_des + cfg.k_m.asDiagonal() * p.motion * xi);
    const JointVector qd_f = pinv * (p.force * v_adm + cfg.k_f.asDiagonal() * p.force * xi);
    const JointVector xi_from_gains = command(m, q, cfg, p, v_des, v_adm, precision_term(cfg, p, xi, xi), JointVector::Zero());
    CHECK(test::near(JointVector(qd_m + qd_f), xi_from_gains, 1e-12 * (1 + xi_from_gains.norm())));

    // Null-space purity of rho.
    const JointVector rho = JointVector::NullaryExpr([&] { return n(rng); });
    const JointVector with_rho = command(m, q, cfg, p, v_des, v_adm, xi, rho);
    CHECK((j * (with_rho - qd)).norm() < 1e-8);
  }
}

TEST_CASE("steady state command is the null-space term") {
  const RobotModel m = default_robot();
  ControllerConfig cfg;
  std::mt19937_64 rng(69);
  const JointVector q = test::random_joints(rng);
  const ProjectionPair p = pair_for(Vec3::UnitZ());
  const Vec3 v_adm = admittance_velocity(cfg, force_error(cfg.f_des, cfg.f_des));
  const Vec3 xi = precision_term(cfg, p, Vec3::Zero(), Vec3::Zero());
  const JointVector rho = JointVector::Constant(0.1);
  const Jacobian j = jacobians(m, q).position;
  const JointVector expected = nullspace_projector(j, damped_pinv(j, cfg.lambda)) * rho;
  CHECK(test::near(command(m, q, cfg, p, Vec3::Zero(), v_adm, xi, rho), expected, 1e-15));
}

TEST_CASE("orientation gradient vanishes when aligned") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(70);
  const JointVector q = test::random_joints(rng);
  const Vec3 n_ee = forward_kinematics(m, q).probe_axis;
  CHECK(orientation_rho(m, q, -n_ee, 1.0).norm() < 1e-15);
  CHECK(alignment_objective(m, q, -n_ee) == doctest::Approx(1.0));
}

TEST_CASE("orientation gradient matches finite differences") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(71);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const JointVector q = test::random_joints(rng);
    const Vec3 n = test::random_unit(rng);
    const JointVector grad = orientation_rho(m, q, n, 1.0);
    JointVector fd;
    for (int i = 0; i < kJoints; ++i) {
      JointVector qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      fd[i] = (alignment_objective(m, qp, n) - alignment_objective(m, qm, n)) / (2 * h);
    }
    CHECK((grad - fd).norm() <= 1e-5 * std::max(grad.norm(), 1e-3));
  }
}

TEST_CASE("alpha scales rho linearly") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(72);
  const JointVector q = test::random_joints(rng);
  const Vec3 n = test::random_unit(rng);
  CHECK(test::near(orientation_rho(m, q, n, 2.5), JointVector(2.5 * orientation_rho(m, q, n, 1.0)), 1e-15));
}

TEST_CASE("projected orientation step does not decrease alignment") {
  const RobotModel m = default_robot();
  ControllerConfig cfg;
  std::mt19937_64 rng(73);
  int tested = 0;
  while (tested < 100) {
    const JointVector q = test::random_joints(rng);
    if (!nonsingular(m, q)) continue;
    const Vec3 n = test::random_unit(rng);
    if (angle_between(n, -forward_kinematics(m, q).probe_axis) < 0.05) continue;
    ++tested;
    const JointVector step = orientation_step(m, q, cfg, n);
    CHECK(step.norm() <= cfg.rho_limit + 1e-15);
    CHECK(step.dot(orientation_rho(m, q, n, 1.0)) >= 0.0);
    CHECK(alignment_objective(m, q + 1e-4 * step, n) >= alignment_objective(m, q, n) - 1e-15);
    // Tip stays put to first order.
    CHECK((jacobians(m, q).position * step).norm() < 1e-5);
  }
}

TEST_CASE("clamp_norm") {
  JointVector v = JointVector::Constant(1.0);
  CHECK(clamp_norm(v, 10.0) == v);
  CHECK(clamp_norm(v, 0.5).norm() == doctest::Approx(0.5));
  CHECK(test::near(JointVector(clamp_norm(v, 0.5).normalized()), JointVector(v.normalized()), 1e-15));
}

TEST_CASE("normal sign continuity and offset frames") {
  CHECK(continuous_normal({0, 0, -1}, {0, 0.1, 1}) == Vec3(0, 0, 1));
  CHECK(continuous_normal({0, 0, 1}, {0, 0.1, 1}) == Vec3(0, 0, 1));
  const Vec3 d_h(0, 0, 0.05);
  CHECK(to_world(d_h, Vec3(1, 0, 0), OffsetFrame::World) == d_h);
  CHECK(test::near(to_world(d_h, Vec3(1, 0, 0), OffsetFrame::Normal), Vec3(0.05, 0, 0), 1e-15));
  CHECK(test::near(to_world(d_h, Vec3::UnitZ(), OffsetFrame::Normal), d_h, 1e-15));
  const Vec3 n = Vec3(0, -1, 1).normalized();
  CHECK(test::near(to_world(Vec3(0, 0, -2), n, OffsetFrame::Normal), Vec3(-2 * n), 1e-14));
}

TEST_CASE("config validation") {
  ControllerConfig c;
  CHECK_NOTHROW(c.validate());
  c.alpha = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ControllerConfig{};
  c.k_adm = {0.1, -0.1, 0.1};
  CHECK_THROWS_AS(c.validate(), Error);
  c = ControllerConfig{};
  c.rate = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
