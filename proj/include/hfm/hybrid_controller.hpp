#pragma once

#include "hfm/common.hpp"
#include "hfm/kinematics.hpp"

namespace hfm {

enum class OffsetFrame { World, Normal };

struct ControllerConfig {
  Vec3 k_m{10.0, 10.0, 10.0};
  Vec3 k_f{10.0, 10.0, 10.0};
  Vec3 k_adm{0.1, 0.1, 0.1};
  Vec3 f_des{0.0, 0.0, -2.0};   // N, force applied to the surface
  Vec3 d_h{0.0, 0.0, 0.05};     // m
  double d = 0.005;             // m, scalar standoff along the estimated normal
  double alpha = 1.0;           // orientation gradient scale
  double rate = 1000.0;         // Hz
  Vec3 k_ee{10.0, 10.0, 10.0};  // resolved-rate gain used while approaching
  double lambda = 1e-3;         // pseudoinverse damping
  double rho_limit = 0.5;       // rad/s, joint-space norm cap on rho
  double approach_depth = 0.002;  // m below the first contact point
  OffsetFrame offset_frame = OffsetFrame::Normal;
  bool orientation = true;      // enable the null-space orientation term

  void validate() const;
};

struct ProjectionPair {
  Mat3 force;   // Omega_f
  Mat3 motion;  // Omega_m
};

struct ControlFrame {
  Vec3 normal;                        // N
  Eigen::Matrix<double, 3, 2> tangent;  // T
};

/// Omega_f = N (N^T N)^-1 N^T, Omega_m = I - Omega_f.
ProjectionPair projections(const ControlFrame& frame);

/// Tangent basis from the world axis least aligned with the normal.
ControlFrame frame_from_normal(const Vec3& n_surf_hat);

/// Picks the sign of n_hat that agrees with the previous control normal.
Vec3 continuous_normal(const Vec3& n_hat, const Vec3& previous);

/// Rotates a force-frame vector (z along N) into world coordinates, or
/// returns it unchanged for OffsetFrame::World.
Vec3 to_world(const Vec3& v, const Vec3& normal, OffsetFrame frame);

inline Vec3 force_error(const Vec3& f_des, const Vec3& f_applied) { return f_des - f_applied; }

/// v_adm = K_adm f_err.
Vec3 admittance_velocity(const ControllerConfig& config, const Vec3& f_err);

/// e = (x_des - x_ee) - d_h.
inline Vec3 motion_force_error(const Vec3& x_des, const Vec3& x_ee, const Vec3& d_h) {
  return (x_des - x_ee) - d_h;
}

/// xi_h = K_m (I - Omega_f) e_m + K_f Omega_f e_f.
Vec3 precision_term(const ControllerConfig& config, const ProjectionPair& pair, const Vec3& e_m,
                    const Vec3& e_f);

/// v_cmd = Omega_m v_des + Omega_f v_adm.
Vec3 cartesian_command(const ProjectionPair& pair, const Vec3& v_des, const Vec3& v_adm);

/// q_dot = J^+ (v_cmd + xi_h) + (I - J^+ J) rho.
JointVector command(const RobotModel& model, const JointVector& q, const ControllerConfig& config,
                    const ProjectionPair& pair, const Vec3& v_des, const Vec3& v_adm,
                    const Vec3& xi_h, const JointVector& rho);

/// g(q) = n_hat^T (-n_ee(q)), the cosine of the probe misalignment.
double alignment_objective(const RobotModel& model, const JointVector& q, const Vec3& n_hat);

/// rho = alpha * grad g = -alpha J_w^T [n_ee]x n_hat.
JointVector orientation_rho(const RobotModel& model, const JointVector& q, const Vec3& n_hat,
                            double alpha);

/// Scales v down so that its norm does not exceed limit.
JointVector clamp_norm(const JointVector& v, double limit);

/// Null-space projected orientation step P*rho, capped at config.rho_limit.
/// Passing the result as `rho` to command() leaves it unchanged up to damping.
JointVector orientation_step(const RobotModel& model, const JointVector& q,
                             const ControllerConfig& config, const Vec3& n_hat);

}  // namespace hfm
