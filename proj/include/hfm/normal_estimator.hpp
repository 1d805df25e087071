#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hfm/common.hpp"

namespace hfm {

struct EstimatorConfig {
  int window = 50;
  std::vector<double> weights;  // empty means uniform (all ones)
  double v_epsilon = 1e-4;      // m/s
  double mu_initial = 0.0;
  double f_min = 0.1;           // N
  double mu_max = 2.0;          // clamp on each friction measurement

  void validate() const;
  double weight(int i) const { return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)]; }
};

/// Fixed-size history of friction measurements, newest first.
class MuHistory {
 public:
  MuHistory() = default;
  MuHistory(int window, double fill) : values_(static_cast<std::size_t>(window), fill) {}

  /// i-th most recent value, i = 1 .. size().
  double at(int i) const {
    const std::size_t n = values_.size();
    return values_[(head_ + n - static_cast<std::size_t>(i)) % n];
  }
  void push(double mu) {
    values_[head_] = mu;
    head_ = (head_ + 1) % values_.size();
  }
  int size() const { return static_cast<int>(values_.size()); }

  friend bool operator==(const MuHistory&, const MuHistory&) = default;

 private:
  std::vector<double> values_;
  std::size_t head_ = 0;
};

struct EstimatorState {
  MuHistory mu_history;
  std::optional<Vec3> last_normal;
  double last_mu = 0.0;

  /// History pre-filled with mu_initial.
  static EstimatorState initial(const EstimatorConfig& config);
};

struct EstimateOutput {
  Vec3 f_n_hat;     // friction-compensated normal force
  Vec3 n_surf_hat;  // unit
  double mu_k;      // current friction measurement
  double mu_bar;    // weighted average used for compensation
  Vec3 f_tau;       // friction force removed from the reading
  bool moving;
};

/// v v^T / (v^T v). Throws ZeroVelocity for v == 0.
Mat3 velocity_projector(const Vec3& v_hat);

/// (1/m) sum_i w_i mu_{k-i} over the full window.
double weighted_average(const EstimatorConfig& config, const EstimatorState& state);

/// One estimator cycle: friction-compensated normal force, surface normal and
/// the online friction coefficient update. Throws NoContact when the reading
/// is below f_min and no normal has been seen yet.
std::pair<EstimateOutput, EstimatorState> estimator_step(const EstimatorConfig& config,
                                                         EstimatorState state, const Vec3& f_s,
                                                         const Vec3& v_hat);

/// Uncompensated cycle (f_n_hat = f_s, friction estimate frozen). Used when
/// the estimator is disabled.
std::pair<EstimateOutput, EstimatorState> passthrough_step(const EstimatorConfig& config,
                                                           EstimatorState state,
                                                           const Vec3& f_s);

}  // namespace hfm
