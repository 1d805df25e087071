#include "hfm/normal_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hfm {

namespace {

Vec3 resolve_normal(const EstimatorConfig& config, EstimatorState& state, const Vec3& f_s,
                    const Vec3& f_n_hat) {
  if (f_s.norm() < config.f_min && !state.last_normal) {
    throw NoContact("no contact force and no previous surface normal");
  }
  const double magnitude = f_n_hat.norm();
  if (magnitude >= config.f_min) state.last_normal = f_n_hat / magnitude;
  if (!state.last_normal) throw NoContact("compensated force below f_min before first normal");
  return *state.last_normal;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (window < 1) throw Error("estimator.window must be >= 1");
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != window) {
      throw Error("estimator.weights must have exactly estimator.window entries");
    }
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); })) {
      throw Error("estimator.weights must all be >= 0");
    }
    const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) / window;
    if (std::abs(mean - 1.0) > 1e-9) {
      throw Error("estimator.weights must satisfy (1/m) sum w_i = 1");
    }
  }
  if (!(v_epsilon > 0.0)) throw Error("estimator.v_epsilon must be > 0");
  if (!(mu_initial >= 0.0)) throw Error("estimator.mu_initial must be >= 0");
  if (!(f_min > 0.0)) throw Error("estimator.f_min must be > 0");
  if (!(mu_max > 0.0)) throw Error("estimator.mu_max must be > 0");
}

EstimatorState EstimatorState::initial(const EstimatorConfig& config) {
  EstimatorState s;
  s.mu_history = MuHistory(config.window, config.mu_initial);
  s.last_mu = config.mu_initial;
  return s;
}

Mat3 velocity_projector(const Vec3& v_hat) {
  const double vv = v_hat.squaredNorm();
  if (vv == 0.0) throw ZeroVelocity("velocity projector of a zero vector");
  return v_hat * v_hat.transpose() / vv;
}

double weighted_average(const EstimatorConfig& config, const EstimatorState& state) {
  const int m = state.mu_history.size();
  double sum = 0.0;
  for (int i = 1; i <= m; ++i) sum += config.weight(i - 1) * state.mu_history.at(i);
  return sum / m;
}

std::pair<EstimateOutput, EstimatorState> estimator_step(const EstimatorConfig& config,
                                                         EstimatorState state, const Vec3& f_s,
                                                         const Vec3& v_hat) {
  EstimateOutput out;
  out.mu_bar = weighted_average(config, state);
  out.moving = v_hat.norm() > config.v_epsilon;

  if (out.moving) {
    const Mat3 omega_v = velocity_projector(v_hat);
    const Vec3 f_v = omega_v * f_s;
    const Vec3 f_perp = f_s - f_v;
    const double f_perp_norm = f_perp.norm();
    out.f_tau = -out.mu_bar * f_perp_norm * v_hat.normalized();
    out.f_n_hat = f_s - out.f_tau;
    if (f_perp_norm >= config.f_min) {
      state.last_mu = std::clamp(f_v.norm() / f_perp_norm, 0.0, config.mu_max);
      state.mu_history.push(state.last_mu);
    }
  } else {
    out.f_tau = Vec3::Zero();
    out.f_n_hat = f_s;
  }
  out.mu_k = state.last_mu;
  out.n_surf_hat = resolve_normal(config, state, f_s, out.f_n_hat);
  return {out, std::move(state)};
}

std::pair<EstimateOutput, EstimatorState> passthrough_step(const EstimatorConfig& config,
                                                           EstimatorState state,
                                                           const Vec3& f_s) {
  EstimateOutput out;
  out.mu_bar = weighted_average(config, state);
  out.moving = false;
  out.f_tau = Vec3::Zero();
  out.f_n_hat = f_s;
  out.mu_k = state.last_mu;
  out.n_surf_hat = resolve_normal(config, state, f_s, out.f_n_hat);
  return {out, std::move(state)};
}

}  // namespace hfm
