#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hfm/scenario.hpp"

namespace hfm {

struct StepRecord {
  double t = 0.0;
  JointVector q = JointVector::Zero();
  Vec3 x_ee = Vec3::Zero();       // probe tip
  Vec3 x_des = Vec3::Zero();      // desired contact point on the surface
  Vec3 f_s = Vec3::Zero();        // sensed force on the probe
  Vec3 f_n_hat = Vec3::Zero();
  Vec3 n_surf_hat = Vec3::Zero();
  Vec3 n_true = Vec3::Zero();
  double mu_bar = 0.0;
  double mu_k = 0.0;
  double gamma = 0.0;   // rad, control normal vs negated probe axis
  double e_norm = 0.0;  // m, |x_ee - x_des|
  bool hybrid = false;
};

struct RunSummary {
  double rms_path_error = 0.0;
  double max_path_error = 0.0;
  double normal_angle_error_mean = 0.0;
  double normal_angle_error_max = 0.0;
  double force_error_rms = 0.0;
  double mu_final = 0.0;
  std::size_t steps = 0;
  std::size_t hybrid_steps = 0;
  double contact_time = 0.0;
};

struct RunResult {
  std::vector<StepRecord> records;
  RunSummary summary;
  std::vector<std::string> warnings;
};

class SimulationDiverged : public Error {
 public:
  SimulationDiverged(const std::string& what, std::vector<StepRecord> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<StepRecord>& partial() const { return partial_; }

 private:
  std::vector<StepRecord> partial_;
};

/// Initial joint posture: scenario q0, or IK onto the first path point
/// raised by start_height with the requested tilt.
JointVector start_posture(const Scenario& scenario);

/// Approach by resolved rate, then `duration * rate` hybrid steps.
/// Throws NoContactReached or SimulationDiverged.
RunResult run(const Scenario& scenario);

/// Metrics over hybrid-phase records. Averages skip the first `transient`
/// seconds after contact; maxima include them. The force error is the sensed
/// normal-force magnitude minus `force_target`.
RunSummary summarize(const std::vector<StepRecord>& records, double transient = 0.5,
                     double force_target = 2.0);

struct Comparison {
  RunResult on;
  RunResult off;
};

/// Runs the scenario with the estimator enabled and disabled, concurrently.
Comparison compare(const Scenario& scenario);

void write_csv(std::ostream& out, const std::vector<StepRecord>& records);

/// Flat `key = value` block.
std::string format_summary(const RunSummary& s);

/// Single-line JSON record.
std::string summary_json(const RunSummary& s);

/// `key = value` block of off-minus-on differences and relative changes.
std::string format_delta(const RunSummary& on, const RunSummary& off);

}  // namespace hfm
