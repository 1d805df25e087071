#pragma once

#include <array>
#include <optional>

#include "hfm/common.hpp"

namespace hfm {

struct RevoluteJoint {
  Vec3 axis;    // unit, expressed in the joint's own frame
  Vec3 offset;  // translation from the previous frame to this joint's origin
};

struct ToolOffset {
  Vec3 offset = Vec3::Zero();                 // last joint frame -> probe tip
  Vec3 approach_axis = Vec3::UnitZ();         // probe direction, tool frame
};

/// Serial chain of seven revolute joints ending at a probe tip.
///
/// Frame i is reached from frame i-1 by translating by `joints[i].offset` and
/// then rotating by q_i about `joints[i].axis`. The tool offset is applied
/// after the last joint and carries no rotation.
struct RobotModel {
  std::array<RevoluteJoint, kJoints> joints;
  ToolOffset tool;

  /// Throws hfm::Error if an axis is not unit length or a vector is not finite.
  void validate() const;
};

/// Seven-joint arm with alternating z/y axes, about 1.3 m fully stretched.
RobotModel default_robot();

struct Pose {
  Vec3 position;     // probe tip, world frame
  Mat3 orientation;  // last joint frame, world frame
  Vec3 probe_axis;   // tool approach axis in world frame (n_ee)
};

struct JacobianPair {
  Jacobian position;  // tip linear velocity
  Jacobian angular;   // end-effector angular velocity
};

Pose forward_kinematics(const RobotModel& model, const JointVector& q);

JacobianPair jacobians(const RobotModel& model, const JointVector& q);

/// Damped least-squares inverse J^T (J J^T + lambda^2 I)^-1.
///
/// With lambda == 0 this is the Moore-Penrose pseudoinverse and throws
/// SingularJacobian if cond(J J^T) exceeds 1e12.
JacobianPinv damped_pinv(const Jacobian& jacobian, double lambda);

/// I - J_pinv * J.
JointMatrix nullspace_projector(const Jacobian& jacobian, const JacobianPinv& jacobian_pinv);

/// Resolved-rate command q_dot = J^+ K (x_des - x_ee) + (I - J^+ J) rho.
JointVector resolved_rate_step(const RobotModel& model, const JointVector& q, const Vec3& x_des,
                               const Vec3& gain_diag, const JointVector& rho, double lambda);

struct IkTarget {
  Vec3 position;
  Vec3 probe_axis;  // unit; desired world direction of n_ee
};

/// Position plus probe-axis inverse kinematics by damped Newton iterations
/// from `seed`. Returns std::nullopt if the residual does not converge.
std::optional<JointVector> solve_ik(const RobotModel& model, const IkTarget& target,
                                    const JointVector& seed, int max_iterations = 500,
                                    double tolerance = 1e-10);

/// Contact-point error with a scalar standoff along the estimated normal:
/// x_cnt_hat = x_ee + n_hat d and e = (x_cnt_des - x_cnt_hat) - n_hat d.
Vec3 contact_point_error(const Vec3& x_cnt_des, const Vec3& x_ee, const Vec3& n_hat, double d);

}  // namespace hfm
