#pragma once

#include <random>

#include "hfm/common.hpp"
#include "hfm/surface.hpp"

namespace hfm {

struct ContactParams {
  double stiffness = 5000.0;    // N/m
  double mu = 0.3;              // Coulomb coefficient
  double slip_regularization = 1e-4;  // m/s
  double noise_std = 0.0;       // N, per axis

  void validate() const;
};

using NoiseSource = std::mt19937_64;

// Penalty-stiffness contact with regularized Coulomb friction. The reading is
// the force the surface exerts on the probe, in world frame. Noise is drawn
// only while in contact, so the generator state advances only then.
Vec3 sense(const SurfaceModel& surface, const ContactParams& params, const Vec3& probe_position,
           const Vec3& probe_velocity, NoiseSource& noise);

}  // namespace hfm
