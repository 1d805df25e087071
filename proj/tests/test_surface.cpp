#include <doctest.h>

#include <random>

#include "hfm/surface.hpp"
#include "test_util.hpp"

using namespace hfm;

namespace {

Vec3 numeric_gradient(const SurfaceModel& s, const Vec3& p, double h = 1e-6) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 dp = Vec3::Zero();
    dp[i] = h;
    g[i] = (query(s, p + dp).signed_distance - query(s, p - dp).signed_distance) / (2 * h);
  }
  return g;
}

std::vector<SurfaceModel> sample_surfaces() {
  Plane tilted;
  tilted.point = {0.1, -0.2, 0.3};
  tilted.normal = Vec3(0.3, -0.2, 1.0).normalized();
  SineExtrusion sine_x;
  sine_x.extrusion_axis = Vec3(1, 1, 0).normalized();
  return {Plane{}, tilted, SineExtrusion{}, sine_x, Dome{}, Dome{{0.5, 0, 0}, 0.1}};
}

}  // namespace

TEST_CASE("plane query") {
  const ContactQuery q = query(Plane{}, {0, 0, 0.05});
  CHECK(q.signed_distance == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(test::near(q.true_normal, Vec3::UnitZ(), 0.0));
  CHECK(test::near(q.closest_point, Vec3::Zero(), 1e-17));
}

TEST_CASE("dome query") {
  const ContactQuery q = query(Dome{{0, 0, 0}, 0.1}, {0, 0, 0.15});
  CHECK(q.signed_distance == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(test::near(q.true_normal, Vec3::UnitZ(), 1e-15));
  CHECK(test::near(q.closest_point, Vec3(0, 0, 0.1), 1e-15));
  CHECK_THROWS_AS(query(Dome{{1, 2, 3}, 0.1}, {1, 2, 3}), DegenerateQuery);
}

TEST_CASE("sine crest has a vertical normal") {
  const SineExtrusion s;  // A = 0.02, k = 2 pi / 0.1, waves along x
  const double crest = std::numbers::pi / 2 / s.frequency;
  const ContactQuery q = query(s, {crest, 0.3, 0.05});
  CHECK(test::near(q.true_normal, Vec3::UnitZ(), 1e-9));
  CHECK(q.signed_distance == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("sine normal follows the analytic gradient") {
  const SineExtrusion s;
  const double x = 0.013;
  const double slope = s.amplitude * s.frequency * std::cos(s.frequency * x);
  const Vec3 expected = Vec3(-slope, 0, 1).normalized();
  CHECK(test::near(query(s, {x, -0.4, 0.0}).true_normal, expected, 1e-14));
}

TEST_CASE("normals equal the normalized numeric gradient of the signed distance") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (const auto& s : sample_surfaces()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vec3 on = query(s, Vec3(0.5 + u(rng), u(rng), u(rng) + 0.05)).closest_point;
      const Vec3 g = numeric_gradient(s, on);
      CHECK(test::near(query(s, on).true_normal, g.normalized(), 1e-5));
    }
  }
}

TEST_CASE("query invariants") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const auto& s : sample_surfaces()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 p(u(rng), u(rng), u(rng));
      const ContactQuery q = query(s, p);
      CHECK(std::abs(q.true_normal.norm() - 1.0) < 1e-12);
      CHECK(std::abs(query(s, q.closest_point).signed_distance) < 1e-9);
    }
  }
}

TEST_CASE("dome distance metric is exact") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const Dome d{{0.5, 0.1, -0.2}, 0.1};
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 p(u(rng), u(rng), u(rng));
    CHECK(std::abs(query(d, p).signed_distance) == std::abs((p - d.center).norm() - d.radius));
  }
}

TEST_CASE("validation rejects bad parameters") {
  CHECK_NOTHROW(validate_surface(Plane{}));
  CHECK_THROWS_AS(validate_surface(Plane{Vec3::Zero(), Vec3(0, 0, 2)}), Error);
  SineExtrusion s;
  s.amplitude = -0.01;
  CHECK_THROWS_AS(validate_surface(s), Error);
  CHECK_THROWS_AS(validate_surface(Dome{Vec3::Zero(), 0.0}), Error);
}

TEST_CASE("linear path on a plane") {
  const auto path = desired_path(Plane{}, {{0, 0, 0}, {0.2, 0, 0}, 20.0, 1000.0});
  REQUIRE(path.size() == 20001);
  CHECK(test::near(path.front().point, Vec3::Zero(), 0.0));
  CHECK(test::near(path.back().point, Vec3(0.2, 0, 0), 1e-15));
  CHECK(path.back().t == doctest::Approx(20.0));
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(test::near(path[i].nominal_normal, Vec3::UnitZ(), 0.0));
    if (i > 0) CHECK(path[i].t > path[i - 1].t);
  }
  // Constant speed: 1 cm/s.
  CHECK((path[1].point - path[0].point).norm() == doctest::Approx(1e-5).epsilon(1e-9));
}

TEST_CASE("dome arc in the Y-Z plane") {
  const Dome d{{0.5, 0, 0}, 0.1};
  const double c = 0.1 * std::cos(std::numbers::pi / 6), s = 0.05;
  const auto path = desired_path(d, {{0.5, -c, s}, {0.5, c, s}, 20.0, 1000.0});
  REQUIRE(path.size() == 20001);
  double max_step = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(std::abs(query(d, path[i].point).signed_distance) < 1e-9);
    CHECK(path[i].point.x() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(test::near(path[i].nominal_normal, query(d, path[i].point).true_normal, 0.0));
    if (i > 0) max_step = std::max(max_step, angle_between(path[i].nominal_normal, path[i - 1].nominal_normal));
  }
  // 120 degrees spread evenly over 20000 steps.
  CHECK(max_step == doctest::Approx(2.0 * std::numbers::pi / 3 / 20000).epsilon(1e-6));
  CHECK(test::near(path[10000].nominal_normal, Vec3::UnitZ(), 1e-12));
}

TEST_CASE("sine path is uniform in arc length") {
  const SineExtrusion sine;
  const auto path = desired_path(sine, {{0.4, 0, 0}, {0.6, 0, 0}, 2.0, 1000.0});
  REQUIRE(path.size() == 2001);
  for (const auto& p : path) CHECK(std::abs(query(sine, p.point).signed_distance) < 1e-9);

  // Oracle: dense polyline, cumulative chord length, linear interpolation.
  const int dense = 400000;
  std::vector<Vec3> pts(dense + 1);
  std::vector<double> cum(dense + 1, 0.0);
  for (int i = 0; i <= dense; ++i) {
    const double x = 0.4 + 0.2 * i / dense;
    pts[i] = {x, 0.0, sine.amplitude * std::sin(sine.frequency * x)};
    if (i > 0) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double target = cum.back() * static_cast<double>(k) / (path.size() - 1);
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const std::size_t j = std::max<std::size_t>(1, it - cum.begin());
    const double f = (target - cum[j - 1]) / (cum[j] - cum[j - 1]);
    const Vec3 oracle = pts[j - 1] + f * (pts[j] - pts[j - 1]);
    worst = std::max(worst, (path[k].point - oracle).norm());
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("path endpoints that cannot be projected") {
  const Dome d{{0, 0, 0}, 0.1};
  CHECK_THROWS_AS(desired_path(d, {{0, 0, 0}, {0, 0, 1}, 1.0, 100.0}), PathOffSurface);
  CHECK_THROWS_AS(desired_path(d, {{0, 0, 1}, {0, 0, -1}, 1.0, 100.0}), PathOffSurface);
  CHECK_THROWS_AS(desired_path(Plane{}, {{NAN, 0, 0}, {0, 0, 1}, 1.0, 100.0}), PathOffSurface);
}

TEST_CASE("zero-duration path is a single sample") {
  const auto path = desired_path(Plane{}, {{0.1, 0, 0.2}, {0.3, 0, 0}, 0.0, 1000.0});
  REQUIRE(path.size() == 1);
  CHECK(test::near(path[0].point, Vec3(0.1, 0, 0), 0.0));
}
