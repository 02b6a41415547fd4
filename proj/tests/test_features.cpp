#include <doctest.h>

#include <numbers>

#include "pushcast/features.hpp"
#include "pushcast/rng.hpp"

using namespace pushcast;

namespace {

constexpr double kPi = std::numbers::pi;

PointCloud plane_cloud(double pitch = 0.005, double extent = 0.08) {
  PointCloud cloud;
  for (double x = -extent; x <= extent; x += pitch) {
    for (double y = -extent; y <= extent; y += pitch) {
      cloud.points.emplace_back(x, y, 0.0);
      cloud.normals.emplace_back(0, 0, 1);
    }
  }
  return cloud;
}

PointCloud cylinder_side_cloud(double radius, double pitch = 0.005) {
  PointCloud cloud;
  const int n_arc = static_cast<int>(kPi * radius / pitch);
  for (int i = 0; i <= n_arc; ++i) {
    const double a = -kPi / 2 + kPi * i / n_arc;
    for (double z = -0.08; z <= 0.08; z += pitch) {
      cloud.points.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
      cloud.normals.emplace_back(std::cos(a), std::sin(a), 0);
    }
  }
  return cloud;
}

PointCloud sphere_cloud(double radius, int n = 4000) {
  PointCloud cloud;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    const Eigen::Vector3d dir(r * std::cos(a), r * std::sin(a), z);
    cloud.points.push_back(radius * dir);
    cloud.normals.push_back(dir);
  }
  return cloud;
}

bool interior(const Eigen::Vector3d& p, double bound) {
  return std::abs(p.x()) < bound && std::abs(p.y()) < bound;
}

}  // namespace

TEST_CASE("plane: interior curvature magnitudes are near zero") {
  const auto features = extract_features(plane_cloud(), {0.02, 8, 1.0});
  REQUIRE(!features.empty());
  int checked = 0;
  for (const auto& f : features) {
    if (!interior(f.v.p, 0.05)) continue;
    CHECK(f.r.x() < 0.05);
    CHECK(f.r.y() < 0.05);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("cylinder side: r1 close to 1/radius, r2 close to zero") {
  const double radius = 0.1;
  const auto features = extract_features(cylinder_side_cloud(radius), {0.02, 8, 1.0});
  REQUIRE(!features.empty());
  double r1 = 0, r2 = 0;
  int n = 0;
  for (const auto& f : features) {
    if (std::abs(f.v.p.z()) > 0.05) continue;  // away from the open ends
    r1 += f.r.x();
    r2 += f.r.y();
    ++n;
  }
  REQUIRE(n > 100);
  CHECK(r1 / n == doctest::Approx(1.0 / radius).epsilon(0.10));
  CHECK(r2 / n < 1.0);
}

TEST_CASE("sphere: both curvatures near 1/radius") {
  const double radius = 0.1;
  const auto features = extract_features(sphere_cloud(radius), {0.02, 8, 1.0});
  REQUIRE(features.size() > 1000);
  double r1 = 0, r2 = 0;
  for (const auto& f : features) {
    r1 += f.r.x();
    r2 += f.r.y();
  }
  r1 /= features.size();
  r2 /= features.size();
  CHECK(r1 == doctest::Approx(1.0 / radius).epsilon(0.10));
  CHECK(r2 == doctest::Approx(1.0 / radius).epsilon(0.10));
}

TEST_CASE("frames are right-handed orthonormal, r1 >= r2") {
  const auto features = extract_features(cylinder_side_cloud(0.1), {0.02, 8, 1.0});
  for (const auto& f : features) {
    const Eigen::Matrix3d m = f.v.q.toRotationMatrix();
    const Eigen::Vector3d k1 = m.col(0), k2 = m.col(1), n = m.col(2);
    CHECK(std::abs(k1.dot(k2)) < 1e-6);
    CHECK(std::abs(k1.dot(n)) < 1e-6);
    CHECK(std::abs(k2.dot(n)) < 1e-6);
    CHECK(k1.cross(k2).dot(n) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.r.x() >= f.r.y());
  }
}

TEST_CASE("normals face outward on a sphere") {
  const auto features = extract_features(sphere_cloud(0.1), {0.02, 8, 1.0});
  for (const auto& f : features) {
    const Eigen::Vector3d n = f.v.q.toRotationMatrix().col(2);
    CHECK(n.dot(f.v.p.normalized()) > 0.9);
  }
}

TEST_CASE("descriptors are invariant and frames equivariant under planar motion") {
  PointCloud base = cylinder_side_cloud(0.1);
  const Posed t(Eigen::Vector3d(0.3, -0.2, 0.0),
                Eigen::Quaterniond(Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitZ())));
  PointCloud moved;
  for (const auto& p : base.points) moved.points.push_back(t.apply(p));
  for (const auto& n : base.normals) moved.normals.push_back(t.rotate(n));

  const auto fa = extract_features(base, {0.02, 8, 1.0});
  const auto fb = extract_features(moved, {0.02, 8, 1.0});
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK((fb[i].r - fa[i].r).norm() < 0.1 * std::max(1.0, fa[i].r.norm()));
    const Posed expect = compose(t, fa[i].v);
    CHECK((fb[i].v.p - expect.p).norm() < 1e-9);
    CHECK(quaternion_distance(fb[i].v.q, expect.q) < 1e-6);
  }
}

TEST_CASE("points with too few neighbors are dropped; empty cloud throws") {
  PointCloud sparse;
  for (int i = 0; i < 20; ++i) sparse.points.emplace_back(i * 1.0, 0, 0);  // 1 m apart
  CHECK_THROWS_AS(extract_features(sparse, {0.02, 8, 1.0}), std::runtime_error);
  PointCloud empty;
  CHECK_THROWS_AS(extract_features(empty, {0.02, 8, 1.0}), std::invalid_argument);

  PointCloud mixed = plane_cloud(0.005, 0.03);
  const std::size_t dense_count = extract_features(mixed, {0.02, 8, 1.0}).size();
  mixed.points.emplace_back(5, 5, 5);  // isolated point
  mixed.normals.emplace_back(0, 0, 1);
  CHECK(extract_features(mixed, {0.02, 8, 1.0}).size() == dense_count);
}

TEST_CASE("mean_descriptor averages componentwise") {
  std::vector<SurfaceFeature> fs(2);
  fs[0].r = Descriptord(2, 0);
  fs[1].r = Descriptord(4, 1);
  CHECK(mean_descriptor(fs).isApprox(Descriptord(3, 0.5)));
}
