#include "hfm/hybrid_controller.hpp"

#include <cmath>

namespace hfm {

namespace {

bool non_negative(const Vec3& v) { return v.allFinite() && (v.array() >= 0.0).all(); }

}  // namespace

void ControllerConfig::validate() const {
  if (!non_negative(k_m)) throw Error("controller.k_m entries must be >= 0");
  if (!non_negative(k_f)) throw Error("controller.k_f entries must be >= 0");
  if (!non_negative(k_adm)) throw Error("controller.k_adm entries must be >= 0");
  if (!non_negative(k_ee)) throw Error("controller.k_ee entries must be >= 0");
  if (!f_des.allFinite() || !d_h.allFinite()) throw Error("controller.f_des/d_h must be finite");
  if (!(alpha > 0.0)) throw Error("controller.alpha must be > 0");
  if (!(rate > 0.0)) throw Error("controller.rate must be > 0");
  if (!(lambda >= 0.0)) throw Error("controller.lambda must be >= 0");
  if (!(rho_limit > 0.0)) throw Error("controller.rho_limit must be > 0");
  if (!(approach_depth >= 0.0)) throw Error("controller.approach_depth must be >= 0");
}

ProjectionPair projections(const ControlFrame& frame) {
  const double nn = frame.normal.squaredNorm();
  if (nn == 0.0) throw DegenerateFrame("force direction N has zero length");
  ProjectionPair p;
  p.force = frame.normal * frame.normal.transpose() / nn;
  p.motion = Mat3::Identity() - p.force;
  return p;
}

ControlFrame frame_from_normal(const Vec3& n_surf_hat) {
  int axis = 0;
  n_surf_hat.cwiseAbs().minCoeff(&axis);
  const Vec3 t_b = n_surf_hat.cross(Vec3::Unit(axis)).normalized();
  const Vec3 t_a = t_b.cross(n_surf_hat).normalized();
  ControlFrame f;
  f.normal = n_surf_hat;
  f.tangent.col(0) = t_a;
  f.tangent.col(1) = t_b;
  return f;
}

Vec3 continuous_normal(const Vec3& n_hat, const Vec3& previous) {
  return n_hat.dot(previous) < 0.0 ? Vec3(-n_hat) : n_hat;
}

Vec3 to_world(const Vec3& v, const Vec3& normal, OffsetFrame frame) {
  if (frame == OffsetFrame::World) return v;
  return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), normal) * v;
}

Vec3 admittance_velocity(const ControllerConfig& config, const Vec3& f_err) {
  return config.k_adm.cwiseProduct(f_err);
}

Vec3 precision_term(const ControllerConfig& config, const ProjectionPair& pair, const Vec3& e_m,
                    const Vec3& e_f) {
  const Mat3 k_m_perp = config.k_m.asDiagonal() * (Mat3::Identity() - pair.force);
  const Mat3 k_f_perp = config.k_f.asDiagonal() * pair.force;
  return k_m_perp * e_m + k_f_perp * e_f;
}

Vec3 cartesian_command(const ProjectionPair& pair, const Vec3& v_des, const Vec3& v_adm) {
  return pair.motion * v_des + pair.force * v_adm;
}

JointVector command(const RobotModel& model, const JointVector& q, const ControllerConfig& config,
                    const ProjectionPair& pair, const Vec3& v_des, const Vec3& v_adm,
                    const Vec3& xi_h, const JointVector& rho) {
  const Jacobian j = jacobians(model, q).position;
  const JacobianPinv pinv = damped_pinv(j, config.lambda);
  const Vec3 v_cmd = cartesian_command(pair, v_des, v_adm);
  return pinv * (v_cmd + xi_h) + nullspace_projector(j, pinv) * rho;
}

double alignment_objective(const RobotModel& model, const JointVector& q, const Vec3& n_hat) {
  return -n_hat.dot(forward_kinematics(model, q).probe_axis);
}

JointVector orientation_rho(const RobotModel& model, const JointVector& q, const Vec3& n_hat,
                            double alpha) {
  const Vec3 n_ee = forward_kinematics(model, q).probe_axis;
  const Jacobian j_w = jacobians(model, q).angular;
  return -alpha * j_w.transpose() * (skew(n_ee) * n_hat);
}

JointVector clamp_norm(const JointVector& v, double limit) {
  const double n = v.norm();
  return n > limit ? JointVector(v * (limit / n)) : v;
}

JointVector orientation_step(const RobotModel& model, const JointVector& q,
                             const ControllerConfig& config, const Vec3& n_hat) {
  const Jacobian j = jacobians(model, q).position;
  const JointMatrix p = nullspace_projector(j, damped_pinv(j, config.lambda));
  return clamp_norm(p * orientation_rho(model, q, n_hat, config.alpha), config.rho_limit);
}

}  // namespace hfm
