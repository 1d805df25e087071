#pragma once

#include <numbers>
#include <variant>
#include <vector>

#include "hfm/common.hpp"

namespace hfm {

struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

// z = base_height + amplitude * sin(frequency * u), where u is the horizontal
// coordinate along extrusion_axis x z. The surface is constant along
// extrusion_axis, which must be horizontal.
struct SineExtrusion {
  double amplitude = 0.02;
  double frequency = 2.0 * std::numbers::pi / 0.1;  // rad/m
  double base_height = 0.0;
  Vec3 extrusion_axis = Vec3::UnitY();

  Vec3 wave_direction() const { return extrusion_axis.cross(Vec3::UnitZ()); }
};

struct Dome {
  Vec3 center = Vec3::Zero();
  double radius = 0.1;
};

using SurfaceModel = std::variant<Plane, SineExtrusion, Dome>;

/// Throws hfm::Error naming the violated invariant.
void validate_surface(const SurfaceModel& surface);

struct ContactQuery {
  double signed_distance;  // negative inside the workpiece
  Vec3 true_normal;        // outward, unit
  Vec3 closest_point;      // on the zero level set
};

/// Exact for planes and domes. The sine extrusion uses the vertical residual
/// and the analytic gradient normal.
ContactQuery query(const SurfaceModel& surface, const Vec3& p);

struct PathSpec {
  Vec3 start;
  Vec3 end;
  double duration = 20.0;      // s
  double sample_rate = 1000.0; // Hz
};

struct PathSample {
  Vec3 point;
  Vec3 nominal_normal;
  double t;
};

/// Constant-speed contact path between the projections of start and end.
///
/// Planes use the segment between the orthogonal projections of the
/// endpoints. Sine extrusions lift the straight horizontal footprint onto the
/// surface and resample it uniformly in arc length. Domes use the great-circle
/// arc between the radial projections. Produces round(duration * sample_rate)
/// + 1 samples.
std::vector<PathSample> desired_path(const SurfaceModel& surface, const PathSpec& spec);

/// Projects p onto the surface the same way desired_path projects endpoints.
Vec3 project_onto_surface(const SurfaceModel& surface, const Vec3& p);

}  // namespace hfm
