#include "hfm/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace hfm {

namespace {

constexpr double kDivergenceRadius = 10.0;  // m
constexpr double kJointSpeedFlag = 10.0;    // rad/s

std::vector<Vec3> path_velocities(const std::vector<PathSample>& path, double rate) {
  const std::size_t n = path.size();
  std::vector<Vec3> v(n, Vec3::Zero());
  if (n < 2) return v;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    v[i] = (path[hi].point - path[lo].point) * rate / static_cast<double>(hi - lo);
  }
  return v;
}

bool finite_record(const StepRecord& r) {
  return r.q.allFinite() && r.x_ee.allFinite() && r.f_s.allFinite() && r.n_surf_hat.allFinite() &&
         std::isfinite(r.mu_bar) && std::isfinite(r.mu_k);
}

}  // namespace

JointVector start_posture(const Scenario& scenario) {
  if (scenario.q0) return *scenario.q0;
  const Vec3 p0 = project_onto_surface(scenario.surface, scenario.path.start);
  const Vec3 n0 = query(scenario.surface, p0).true_normal;
  const Eigen::AngleAxisd tilt(scenario.start_tilt_deg * std::numbers::pi / 180.0,
                               scenario.start_tilt_axis);
  const IkTarget target{p0 + scenario.start_height * n0, tilt * Vec3(-n0)};
  const auto q = solve_ik(scenario.robot, target, scenario.q_seed);
  if (!q) throw Error("start posture is unreachable from robot.q_seed");
  return *q;
}

RunResult run(const Scenario& s) {
  RunResult result;
  const auto hybrid_steps = static_cast<std::size_t>(std::llround(s.duration * s.rate));
  if (hybrid_steps == 0) return result;

  const double dt = 1.0 / s.rate;
  const std::vector<PathSample> path = desired_path(s.surface, s.path);
  const std::vector<Vec3> path_vel = path_velocities(path, s.rate);
  const Vec3 p0 = path.front().point;
  const Vec3 n0 = path.front().nominal_normal;
  const ControllerConfig& cc = s.controller;

  JointVector q = start_posture(s);
  JointVector q_dot = JointVector::Zero();
  Vec3 v_des_prev = Vec3::Zero();
  Vec3 control_normal = n0;
  EstimatorState est = EstimatorState::initial(s.estimator);
  NoiseSource noise(s.seed);

  bool hybrid = false;
  std::size_t contact_step = 0;
  bool speed_flagged = false;
  bool range_flagged = false;
  const auto approach_limit = static_cast<std::size_t>(std::llround(s.approach_timeout * s.rate));

  for (std::size_t i = 0;; ++i) {
    if (hybrid && i - contact_step >= hybrid_steps) break;

    const Pose pose = forward_kinematics(s.robot, q);
    const JacobianPair jac = jacobians(s.robot, q);
    const Vec3 v_tip = jac.position * q_dot;
    const Vec3 f_s = sense(s.surface, s.contact, pose.position, v_tip, noise);

    if (!hybrid && f_s.norm() >= s.estimator.f_min) {
      hybrid = true;
      contact_step = i;
    }

    StepRecord rec;
    rec.t = static_cast<double>(i) * dt;
    rec.q = q;
    rec.x_ee = pose.position;
    rec.f_s = f_s;
    rec.n_true = query(s.surface, pose.position).true_normal;
    rec.hybrid = hybrid;

    if (!hybrid) {
      if (i >= approach_limit) {
        throw NoContactReached("no contact within " + std::to_string(s.approach_timeout) +
                               " s of approach");
      }
      const Vec3 target = p0 - cc.approach_depth * n0;
      const JointVector rho =
          cc.orientation ? orientation_step(s.robot, q, cc, control_normal) : JointVector::Zero();
      q_dot = resolved_rate_step(s.robot, q, target, cc.k_ee, rho, cc.lambda);
      rec.x_des = p0;
      rec.f_n_hat = f_s;
      rec.n_surf_hat = control_normal;
      rec.mu_bar = weighted_average(s.estimator, est);
      rec.mu_k = est.last_mu;
    } else {
      const std::size_t k = std::min(i - contact_step, path.size() - 1);
      const bool path_running = i - contact_step < path.size() - 1;
      const Vec3 v_des = path_running ? path_vel[k] : Vec3::Zero();

      auto [estimate, next] = s.estimator_enabled
                                  ? estimator_step(s.estimator, std::move(est), f_s, v_des_prev)
                                  : passthrough_step(s.estimator, std::move(est), f_s);
      est = std::move(next);
      if (s.estimator_enabled) control_normal = continuous_normal(estimate.n_surf_hat, control_normal);

      const ProjectionPair pair = projections(frame_from_normal(control_normal));
      const Vec3 f_des = to_world(cc.f_des, control_normal, cc.offset_frame);
      const Vec3 d_h = to_world(cc.d_h, control_normal, cc.offset_frame);
      const Vec3 x_des = path[k].point + d_h;
      const Vec3 e = motion_force_error(x_des, pose.position, d_h);
      const Vec3 v_adm = admittance_velocity(cc, force_error(f_des, -f_s));
      const Vec3 xi_h = precision_term(cc, pair, e, e);
      JointVector rho = JointVector::Zero();
      if (cc.orientation) {
        rho = orientation_step(s.robot, q, cc, control_normal);
      }
      q_dot = command(s.robot, q, cc, pair, v_des, v_adm, xi_h, rho);
      v_des_prev = v_des;

      rec.x_des = path[k].point;
      rec.f_n_hat = estimate.f_n_hat;
      rec.n_surf_hat = estimate.n_surf_hat;
      rec.mu_bar = estimate.mu_bar;
      rec.mu_k = estimate.mu_k;
    }
    rec.gamma = angle_between(control_normal, -pose.probe_axis);
    rec.e_norm = (rec.x_ee - rec.x_des).norm();
    result.records.push_back(rec);

    if (!finite_record(rec) || !q_dot.allFinite() || pose.position.norm() > kDivergenceRadius) {
      throw SimulationDiverged("simulation diverged at t = " + std::to_string(rec.t) + " s",
                               std::move(result.records));
    }
    if (!speed_flagged && q_dot.norm() > kJointSpeedFlag) {
      speed_flagged = true;
      result.warnings.push_back("joint speed exceeded 10 rad/s at t = " + std::to_string(rec.t));
    }
    q += dt * q_dot;
    if (!range_flagged && (q.array().abs() > 2.0 * std::numbers::pi).any()) {
      range_flagged = true;
      result.warnings.push_back("a joint angle exceeded 2 pi at t = " + std::to_string(rec.t));
    }
  }

  result.summary = summarize(result.records, s.metrics_transient, cc.f_des.norm());
  return result;
}

RunSummary summarize(const std::vector<StepRecord>& records, double transient,
                     double force_target) {
  RunSummary s;
  s.steps = records.size();
  const StepRecord* first_hybrid = nullptr;
  for (const auto& r : records) {
    if (r.hybrid) {
      first_hybrid = &r;
      break;
    }
  }
  if (!first_hybrid) return s;
  s.contact_time = first_hybrid->t;

  double sq_err = 0.0, angle_sum = 0.0, sq_force = 0.0;
  std::size_t window = 0;
  for (const auto& r : records) {
    if (!r.hybrid) continue;
    ++s.hybrid_steps;
    const double angle = angle_between(r.n_surf_hat, r.n_true);
    s.max_path_error = std::max(s.max_path_error, r.e_norm);
    s.normal_angle_error_max = std::max(s.normal_angle_error_max, angle);
    // Small tolerance so a window boundary on an exact sample time is inclusive.
    if (r.t - s.contact_time < transient - 1e-9) continue;
    ++window;
    sq_err += r.e_norm * r.e_norm;
    angle_sum += angle;
    const double force_err = std::abs(r.f_s.dot(r.n_true)) - force_target;
    sq_force += force_err * force_err;
  }
  if (window > 0) {
    s.rms_path_error = std::sqrt(sq_err / static_cast<double>(window));
    s.normal_angle_error_mean = angle_sum / static_cast<double>(window);
    s.force_error_rms = std::sqrt(sq_force / static_cast<double>(window));
  }
  s.mu_final = records.back().mu_bar;
  return s;
}

Comparison compare(const Scenario& scenario) {
  Scenario on = scenario;
  on.estimator_enabled = true;
  Scenario off = scenario;
  off.estimator_enabled = false;
  auto off_future = std::async(std::launch::async, [&off] { return run(off); });
  Comparison c;
  c.on = run(on);
  c.off = off_future.get();
  return c;
}

void write_csv(std::ostream& out, const std::vector<StepRecord>& records) {
  out << "t,q1,q2,q3,q4,q5,q6,q7,"
         "x_ee_x,x_ee_y,x_ee_z,x_des_x,x_des_y,x_des_z,"
         "f_s_x,f_s_y,f_s_z,f_n_hat_x,f_n_hat_y,f_n_hat_z,"
         "n_surf_hat_x,n_surf_hat_y,n_surf_hat_z,n_true_x,n_true_y,n_true_z,"
         "mu_bar,mu_k,gamma,e_norm,phase\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out << buf;
  };
  auto put3 = [&](const Vec3& v) {
    for (int i = 0; i < 3; ++i) {
      put(v[i]);
      out << ',';
    }
  };
  for (const auto& r : records) {
    put(r.t);
    out << ',';
    for (int i = 0; i < kJoints; ++i) {
      put(r.q[i]);
      out << ',';
    }
    put3(r.x_ee);
    put3(r.x_des);
    put3(r.f_s);
    put3(r.f_n_hat);
    put3(r.n_surf_hat);
    put3(r.n_true);
    put(r.mu_bar);
    out << ',';
    put(r.mu_k);
    out << ',';
    put(r.gamma);
    out << ',';
    put(r.e_norm);
    out << ',' << (r.hybrid ? 1 : 0) << '\n';
  }
}

std::string format_summary(const RunSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "rms_path_error = %.9g\n"
                "max_path_error = %.9g\n"
                "normal_angle_error_mean = %.9g\n"
                "normal_angle_error_max = %.9g\n"
                "force_error_rms = %.9g\n"
                "mu_final = %.9g\n"
                "steps = %zu\n"
                "hybrid_steps = %zu\n"
                "contact_time = %.9g\n",
                s.rms_path_error, s.max_path_error, s.normal_angle_error_mean,
                s.normal_angle_error_max, s.force_error_rms, s.mu_final, s.steps, s.hybrid_steps,
                s.contact_time);
  return buf;
}

std::string summary_json(const RunSummary& s) {
  const nlohmann::json j = {
      {"rms_path_error", s.rms_path_error},
      {"max_path_error", s.max_path_error},
      {"normal_angle_error_mean", s.normal_angle_error_mean},
      {"normal_angle_error_max", s.normal_angle_error_max},
      {"force_error_rms", s.force_error_rms},
      {"mu_final", s.mu_final},
      {"steps", s.steps},
      {"hybrid_steps", s.hybrid_steps},
      {"contact_time", s.contact_time},
  };
  return j.dump();
}

std::string format_delta(const RunSummary& on, const RunSummary& off) {
  auto rel = [](double on_v, double off_v) { return off_v > 0.0 ? 1.0 - on_v / off_v : 0.0; };
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "rms_path_error_off_minus_on = %.9g\n"
                "rms_path_error_improvement = %.9g\n"
                "max_path_error_off_minus_on = %.9g\n"
                "normal_angle_error_mean_off_minus_on = %.9g\n"
                "normal_angle_error_mean_improvement = %.9g\n"
                "force_error_rms_off_minus_on = %.9g\n",
                off.rms_path_error - on.rms_path_error,
                rel(on.rms_path_error, off.rms_path_error),
                off.max_path_error - on.max_path_error,
                off.normal_angle_error_mean - on.normal_angle_error_mean,
                rel(on.normal_angle_error_mean, off.normal_angle_error_mean),
                off.force_error_rms - on.force_error_rms);
  return buf;
}

}  // namespace hfm
