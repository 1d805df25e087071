#include "hfm/kinematics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace hfm {

namespace {

struct ChainState {
  std::array<Vec3, kJoints> origins;      // joint origins, world frame
  std::array<Vec3, kJoints> axes;         // joint axes, world frame
  Mat3 rotation;                          // last joint frame
  Vec3 tip;
};

ChainState propagate(const RobotModel& model, const JointVector& q) {
  ChainState s;
  Mat3 r = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const auto& joint = model.joints[i];
    p += r * joint.offset;
    s.origins[i] = p;
    s.axes[i] = r * joint.axis;
    r = r * Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix();
  }
  s.rotation = r;
  s.tip = p + r * model.tool.offset;
  return s;
}

}  // namespace

void RobotModel::validate() const {
  for (int i = 0; i < kJoints; ++i) {
    const auto& j = joints[i];
    if (!j.axis.allFinite() || !j.offset.allFinite()) {
      throw Error("joint " + std::to_string(i + 1) + " has non-finite parameters");
    }
    if (std::abs(j.axis.norm() - 1.0) > 1e-12) {
      throw Error("joint " + std::to_string(i + 1) + " axis is not unit length");
    }
  }
  if (!tool.offset.allFinite() || std::abs(tool.approach_axis.norm() - 1.0) > 1e-12) {
    throw Error("tool approach axis must be a finite unit vector");
  }
}

RobotModel default_robot() {
  RobotModel m;
  const Vec3 z = Vec3::UnitZ();
  const Vec3 y = Vec3::UnitY();
  m.joints = {{
      {z, {0.0, 0.0, 0.20}},
      {y, {0.0, 0.0, 0.10}},
      {z, {0.0, 0.0, 0.30}},
      {y, {0.05, 0.0, 0.10}},
      {z, {-0.05, 0.0, 0.30}},
      {y, {0.0, 0.0, 0.20}},
      {z, {0.0, 0.0, 0.0}},
  }};
  m.tool.offset = {0.0, 0.0, 0.03};
  m.tool.approach_axis = z;
  return m;
}

Pose forward_kinematics(const RobotModel& model, const JointVector& q) {
  const ChainState s = propagate(model, q);
  return {s.tip, s.rotation, s.rotation * model.tool.approach_axis};
}

JacobianPair jacobians(const RobotModel& model, const JointVector& q) {
  const ChainState s = propagate(model, q);
  JacobianPair jp;
  for (int i = 0; i < kJoints; ++i) {
    jp.angular.col(i) = s.axes[i];
    jp.position.col(i) = s.axes[i].cross(s.tip - s.origins[i]);
  }
  return jp;
}

JacobianPinv damped_pinv(const Jacobian& jacobian, double lambda) {
  const Mat3 jjt = jacobian * jacobian.transpose();
  if (lambda == 0.0) {
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(jjt);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
      throw SingularJacobian("J J^T is singular; use a positive damping factor");
    }
  }
  const Mat3 damped = jjt + lambda * lambda * Mat3::Identity();
  return jacobian.transpose() * damped.ldlt().solve(Mat3::Identity());
}

JointMatrix nullspace_projector(const Jacobian& jacobian, const JacobianPinv& jacobian_pinv) {
  return JointMatrix::Identity() - jacobian_pinv * jacobian;
}

JointVector resolved_rate_step(const RobotModel& model, const JointVector& q, const Vec3& x_des,
                               const Vec3& gain_diag, const JointVector& rho, double lambda) {
  const Pose pose = forward_kinematics(model, q);
  const Jacobian j = jacobians(model, q).position;
  const JacobianPinv pinv = damped_pinv(j, lambda);
  const Vec3 x_dot = gain_diag.asDiagonal() * (x_des - pose.position);
  return pinv * x_dot + nullspace_projector(j, pinv) * rho;
}

std::optional<JointVector> solve_ik(const RobotModel& model, const IkTarget& target,
                                    const JointVector& seed, int max_iterations,
                                    double tolerance) {
  using Mat6x7 = Eigen::Matrix<double, 6, kJoints>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  const Vec3 axis_target = target.probe_axis.normalized();
  JointVector q = seed;
  for (int it = 0; it < max_iterations; ++it) {
    const Pose pose = forward_kinematics(model, q);
    Vec6 err;
    err.head<3>() = target.position - pose.position;
    // Rotation vector taking the probe axis onto the target axis.
    const Vec3 c = pose.probe_axis.cross(axis_target);
    const double angle = angle_between(pose.probe_axis, axis_target);
    err.tail<3>() = c.norm() > 1e-15 ? Vec3(c.normalized() * angle) : Vec3::Zero();
    if (err.norm() < tolerance) {
      for (auto& a : q) a = std::remainder(a, 2.0 * std::numbers::pi);
      return q;
    }

    const JacobianPair jp = jacobians(model, q);
    Mat6x7 j;
    j.topRows<3>() = jp.position;
    j.bottomRows<3>() = jp.angular;
    const Eigen::Matrix<double, 6, 6> jjt =
        j * j.transpose() + 1e-6 * Eigen::Matrix<double, 6, 6>::Identity();
    q += j.transpose() * jjt.ldlt().solve(err);
  }
  return std::nullopt;
}

Vec3 contact_point_error(const Vec3& x_cnt_des, const Vec3& x_ee, const Vec3& n_hat, double d) {
  const Vec3 x_cnt_hat = x_ee + n_hat * d;
  return (x_cnt_des - x_cnt_hat) - n_hat * d;
}

}  // namespace hfm
