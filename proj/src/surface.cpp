#include "hfm/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hfm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sine_height(const SineExtrusion& s, double u) {
  return s.base_height + s.amplitude * std::sin(s.frequency * u);
}

double sine_slope(const SineExtrusion& s, double u) {
  return s.amplitude * s.frequency * std::cos(s.frequency * u);
}

// Lifted footprint a + s (b - a), s in [0, 1], for the sine extrusion.
class SineFootprint {
 public:
  SineFootprint(const SineExtrusion& surface, const Vec3& a, const Vec3& b)
      : surface_(surface), a_(a.x(), a.y(), 0.0), delta_(b.x() - a.x(), b.y() - a.y(), 0.0) {
    du_ = surface_.wave_direction().dot(delta_);
    u0_ = surface_.wave_direction().dot(a_);
  }

  Vec3 point(double s) const {
    Vec3 p = a_ + s * delta_;
    p.z() = sine_height(surface_, u0_ + s * du_);
    return p;
  }

  double speed(double s) const {
    const double dz = sine_slope(surface_, u0_ + s * du_) * du_;
    return std::sqrt(delta_.squaredNorm() + dz * dz);
  }

  // Five-point Gauss-Legendre over [s0, s1].
  double arc_length(double s0, double s1) const {
    static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665,
                                                0.4786286704993665, 0.2369268850561891,
                                                0.2369268850561891};
    const double half = 0.5 * (s1 - s0);
    const double mid = 0.5 * (s1 + s0);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * speed(mid + half * x[i]);
    return sum * half;
  }

 private:
  SineExtrusion surface_;
  Vec3 a_;
  Vec3 delta_;
  double du_ = 0.0;
  double u0_ = 0.0;
};

std::vector<double> sample_times(const PathSpec& spec, std::size_t& count) {
  if (!(spec.duration >= 0.0) || !(spec.sample_rate > 0.0)) {
    throw Error("path duration must be >= 0 and sample rate > 0");
  }
  count = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate)) + 1;
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i) / spec.sample_rate;
  return t;
}

}  // namespace

void validate_surface(const SurfaceModel& surface) {
  std::visit(Overloaded{
                 [](const Plane& p) {
                   if (!p.point.allFinite() || std::abs(p.normal.norm() - 1.0) > 1e-12) {
                     throw Error("surface.normal must be unit length");
                   }
                 },
                 [](const SineExtrusion& s) {
                   if (!(s.amplitude >= 0.0)) throw Error("surface.amplitude must be >= 0");
                   if (!(s.frequency > 0.0)) throw Error("surface.wavelength must be > 0");
                   if (std::abs(s.extrusion_axis.norm() - 1.0) > 1e-12 ||
                       std::abs(s.extrusion_axis.z()) > 1e-12) {
                     throw Error("surface.axis must be a horizontal unit vector");
                   }
                 },
                 [](const Dome& d) {
                   if (!(d.radius > 0.0)) throw Error("surface.radius must be > 0");
                   if (!d.center.allFinite()) throw Error("surface.center must be finite");
                 },
             },
             surface);
}

ContactQuery query(const SurfaceModel& surface, const Vec3& p) {
  return std::visit(
      Overloaded{
          [&](const Plane& pl) -> ContactQuery {
            const double d = pl.normal.dot(p - pl.point);
            return {d, pl.normal, p - d * pl.normal};
          },
          [&](const SineExtrusion& s) -> ContactQuery {
            const Vec3 w = s.wave_direction();
            const double u = w.dot(p);
            const double h = sine_height(s, u);
            const Vec3 n = (Vec3::UnitZ() - sine_slope(s, u) * w).normalized();
            return {p.z() - h, n, {p.x(), p.y(), h}};
          },
          [&](const Dome& d) -> ContactQuery {
            const Vec3 r = p - d.center;
            const double len = r.norm();
            if (len == 0.0) throw DegenerateQuery("dome query at its center has no normal");
            const Vec3 n = r / len;
            return {len - d.radius, n, d.center + d.radius * n};
          },
      },
      surface);
}

Vec3 project_onto_surface(const SurfaceModel& surface, const Vec3& p) {
  if (!p.allFinite()) throw PathOffSurface("path endpoint is not finite");
  try {
    return query(surface, p).closest_point;
  } catch (const DegenerateQuery&) {
    throw PathOffSurface("path endpoint coincides with the dome center");
  }
}

std::vector<PathSample> desired_path(const SurfaceModel& surface, const PathSpec& spec) {
  std::size_t n = 0;
  const std::vector<double> times = sample_times(spec, n);
  const Vec3 a = project_onto_surface(surface, spec.start);
  const Vec3 b = project_onto_surface(surface, spec.end);
  const double last = n > 1 ? static_cast<double>(n - 1) : 1.0;

  std::vector<PathSample> out;
  out.reserve(n);
  auto push = [&](const Vec3& point, double t) {
    out.push_back({point, query(surface, point).true_normal, t});
  };

  if (const auto* dome = std::get_if<Dome>(&surface)) {
    const Vec3 da = (a - dome->center).normalized();
    const Vec3 db = (b - dome->center).normalized();
    const double theta = angle_between(da, db);
    if (theta > std::numbers::pi - 1e-9) throw PathOffSurface("antipodal dome endpoints define no unique arc");
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / last;
      Vec3 dir = da;
      if (theta > 1e-15) {
        dir = (std::sin((1.0 - s) * theta) * da + std::sin(s * theta) * db) / std::sin(theta);
      }
      push(dome->center + dome->radius * dir.normalized(), times[i]);
    }
    return out;
  }

  if (const auto* sine = std::get_if<SineExtrusion>(&surface)) {
    const SineFootprint fp(*sine, a, b);
    // Cumulative arc length on a fine grid, then invert per sample with Newton.
    constexpr int kCells = 4096;
    std::vector<double> cum(kCells + 1, 0.0);
    for (int c = 0; c < kCells; ++c) {
      cum[c + 1] = cum[c] + fp.arc_length(static_cast<double>(c) / kCells,
                                          static_cast<double>(c + 1) / kCells);
    }
    const double total = cum.back();
    for (std::size_t i = 0; i < n; ++i) {
      const double target = total * static_cast<double>(i) / last;
      if (total == 0.0) {
        push(fp.point(0.0), times[i]);
        continue;
      }
      const auto it = std::upper_bound(cum.begin(), cum.end(), target);
      const int cell = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, kCells - 1);
      const double s0 = static_cast<double>(cell) / kCells;
      const double s1 = static_cast<double>(cell + 1) / kCells;
      double s = s0 + (target - cum[cell]) / (cum[cell + 1] - cum[cell]) * (s1 - s0);
      for (int k = 0; k < 8; ++k) {
        const double residual = cum[cell] + fp.arc_length(s0, s) - target;
        s -= residual / fp.speed(s);
        s = std::clamp(s, s0, s1);
        if (std::abs(residual) < 1e-14) break;
      }
      push(fp.point(s), times[i]);
    }
    return out;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / last;
    push(a + s * (b - a), times[i]);
  }
  return out;
}

}  // namespace hfm
