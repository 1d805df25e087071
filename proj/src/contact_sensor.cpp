#include "hfm/contact_sensor.hpp"

#include <cmath>

namespace hfm {

void ContactParams::validate() const {
  if (!(stiffness > 0.0)) throw Error("contact.stiffness must be > 0");
  if (!(mu >= 0.0)) throw Error("contact.mu must be >= 0 (mu_true >= 0)");
  if (!(slip_regularization > 0.0)) throw Error("contact.slip_regularization must be > 0");
  if (!(noise_std >= 0.0)) throw Error("contact.noise_std must be >= 0");
}

Vec3 sense(const SurfaceModel& surface, const ContactParams& params, const Vec3& probe_position,
           const Vec3& probe_velocity, NoiseSource& noise) {
  const ContactQuery c = query(surface, probe_position);
  if (c.signed_distance >= 0.0) return Vec3::Zero();

  const double normal_magnitude = params.stiffness * -c.signed_distance;
  const Vec3 f_normal = normal_magnitude * c.true_normal;
  const Vec3 v_t = probe_velocity - c.true_normal.dot(probe_velocity) * c.true_normal;
  const double reg = std::sqrt(v_t.squaredNorm() +
                               params.slip_regularization * params.slip_regularization);
  Vec3 f = f_normal - params.mu * normal_magnitude * v_t / reg;

  if (params.noise_std > 0.0) {
    std::normal_distribution<double> gauss(0.0, params.noise_std);
    for (int i = 0; i < 3; ++i) f[i] += gauss(noise);
  }
  return f;
}

}  // namespace hfm
