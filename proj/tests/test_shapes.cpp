#include <doctest.h>

#include <map>
#include <numbers>
#include <set>

#include "pushcast/rng.hpp"
#include "pushcast/shapes.hpp"

using namespace pushcast;

namespace {

// Every directed edge must be matched by its reverse exactly once.
bool watertight(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      edges[{a, b}]++;
    }
  }
  for (const auto& [edge, count] : edges) {
    if (count != 1) return false;
    if (!edges.count({edge.second, edge.first})) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cube mesh: 12 triangles, expected dims, watertight") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  CHECK(m.triangles.size() == 12);
  CHECK(m.dims.isApprox(Eigen::Vector3d(0.2, 0.2, 0.2), 1e-12));
  CHECK(watertight(m));
  CHECK(m.signed_volume() == doctest::Approx(0.008).epsilon(1e-9));
}

TEST_CASE("cylinder mesh dims and volume") {
  const TriMesh m = make_mesh(ShapeSpec::cylinder(0.2, 0.1, 64));
  CHECK(m.dims.x() == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(m.dims.z() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(watertight(m));
  // Faceted volume: n * r^2 * sin(2pi/n) / 2 * h.
  const double expected = 64 * 0.1 * 0.1 * std::sin(2 * std::numbers::pi / 64) / 2 * 0.2;
  CHECK(m.signed_volume() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("hybrid mesh volume matches the cross-section oracle") {
  const int segments = 64;
  const TriMesh m = make_mesh(ShapeSpec::hybrid(0.2, segments));
  CHECK(watertight(m));
  CHECK(m.dims.isApprox(Eigen::Vector3d(0.2, 0.2, 0.2), 1e-9));
  // Half-disc fan with arc facets plus the triangle, extruded.
  const int arc = segments / 2;
  const double r = 0.1;
  double halfdisc = 0;
  for (int i = 0; i < arc; ++i) halfdisc += 0.5 * r * r * std::sin(std::numbers::pi / arc);
  const double triangle = 0.5 * 0.2 * 0.1;
  CHECK(m.signed_volume() == doctest::Approx((halfdisc + triangle) * 0.2).epsilon(1e-9));
}

TEST_CASE("notched cube removes one sixteenth of the volume") {
  const TriMesh m = make_mesh(ShapeSpec::notched_cube(0.2));
  CHECK(watertight(m));
  CHECK(m.signed_volume() == doctest::Approx(0.008 * 15.0 / 16.0).epsilon(1e-9));
  CHECK(m.dims.isApprox(Eigen::Vector3d(0.2, 0.2, 0.2), 1e-12));
}

TEST_CASE("canonical pose: resting face at -dims_z/2, centroid on the z axis") {
  for (const auto& spec : {ShapeSpec::cube(0.2), ShapeSpec::cylinder(0.2, 0.1),
                           ShapeSpec::hybrid(0.2), ShapeSpec::notched_cube(0.2)}) {
    const TriMesh m = make_mesh(spec);
    double zmin = m.vertices.front().z();
    for (const auto& v : m.vertices) zmin = std::min(zmin, v.z());
    CHECK(zmin == doctest::Approx(-m.dims.z() / 2).epsilon(1e-12));
    const Eigen::Vector3d c = m.volume_centroid();
    CHECK(std::abs(c.x()) < 1e-12);
    CHECK(std::abs(c.y()) < 1e-12);
  }
}

TEST_CASE("make_mesh rejects bad specs") {
  ShapeSpec bad = ShapeSpec::cube(0.2);
  bad.dimensions.y() = -1;
  CHECK_THROWS_AS(make_mesh(bad), std::invalid_argument);
}

TEST_CASE("full cloud: count tracks surface area, deterministic per seed") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  const PointCloud a = sample_full_cloud(m, 10000, 42);
  CHECK(a.points.size() == doctest::Approx(0.24 * 10000).epsilon(0.05));
  const PointCloud b = sample_full_cloud(m, 10000, 42);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
  const PointCloud c = sample_full_cloud(m, 10000, 43);
  CHECK(a.points.front() != c.points.front());
  CHECK_THROWS_AS(sample_full_cloud(m, 0, 1), std::invalid_argument);
}

TEST_CASE("full cloud samples lie on the surface") {
  const TriMesh m = make_mesh(ShapeSpec::cylinder(0.2, 0.1));
  const PointCloud cloud = sample_full_cloud(m, 3000, 5);
  for (std::size_t i = 0; i < cloud.points.size(); i += 7)
    CHECK(closest_point(m, cloud.points[i]).distance < 1e-9);
}

TEST_CASE("partial cloud culls the far face") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  const Posed pose = Posed::translation(0, 0, 0.1);
  const PointCloud cloud = sample_partial_cloud(m, pose, Eigen::Vector3d(-1, 0, 0.1), 8000, 3);
  REQUIRE(!cloud.points.empty());
  for (const auto& p : cloud.points) CHECK(p.x() < 0.0999);  // +x face is hidden
}

TEST_CASE("partial cloud from a corner sees exactly three faces") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  const Posed pose = Posed::translation(0, 0, 0.1);
  const PointCloud cloud = sample_partial_cloud(m, pose, Eigen::Vector3d(1, 1, 1), 8000, 4);
  std::set<int> faces;  // -x,+x,-y,+y,-z,+z
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Eigen::Vector3d& n = cloud.normals[i];
    if (n.x() > 0.9) faces.insert(1);
    if (n.x() < -0.9) faces.insert(0);
    if (n.y() > 0.9) faces.insert(3);
    if (n.y() < -0.9) faces.insert(2);
    if (n.z() > 0.9) faces.insert(5);
    if (n.z() < -0.9) faces.insert(4);
  }
  CHECK(faces == std::set<int>{1, 3, 5});
}

TEST_CASE("partial cloud rejects a viewpoint inside the mesh") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  CHECK_THROWS_AS(
      sample_partial_cloud(m, Posed::identity(), Eigen::Vector3d(0, 0, 0), 1000, 1),
      std::invalid_argument);
}

TEST_CASE("partial-cloud occlusion agrees with a brute-force ray oracle") {
  const TriMesh m = make_mesh(ShapeSpec::hybrid(0.2, 32));
  const Posed pose = Posed::translation(0, 0, 0.1);
  const Eigen::Vector3d viewpoint(0.8, 0.5, 0.6);
  const double density = 4000;
  const std::uint64_t seed = 9;
  const PointCloud partial = sample_partial_cloud(m, pose, viewpoint, density, seed);

  // Oracle: same candidate samples, visibility decided by plane-barycentric
  // segment intersection written independently of the library routine.
  TriMesh world = m;
  for (auto& v : world.vertices) v = pose.apply(v);
  const PointCloud all = sample_full_cloud(world, density, seed);
  std::vector<Eigen::Vector3d> visible;
  for (std::size_t i = 0; i < all.points.size(); ++i) {
    const Eigen::Vector3d& p = all.points[i];
    if (all.normals[i].dot(viewpoint - p) <= 1e-9) continue;
    bool occluded = false;
    const Eigen::Vector3d start = p + 1e-6 * (viewpoint - p).normalized();
    for (const auto& t : world.triangles) {
      const Eigen::Vector3d &a = world.vertices[t[0]], &b = world.vertices[t[1]],
                            &c = world.vertices[t[2]];
      const Eigen::Vector3d n = (b - a).cross(c - a);
      const double denom = n.dot(viewpoint - start);
      if (std::abs(denom) < 1e-15) continue;
      const double s = n.dot(a - start) / denom;
      if (s <= 0 || s >= 1 - 1e-6 / (viewpoint - start).norm()) continue;
      const Eigen::Vector3d hit = start + s * (viewpoint - start);
      const double area = n.norm();
      const double w0 = (b - hit).cross(c - hit).dot(n) / (area * area);
      const double w1 = (c - hit).cross(a - hit).dot(n) / (area * area);
      const double w2 = (a - hit).cross(b - hit).dot(n) / (area * area);
      if (w0 >= 0 && w1 >= 0 && w2 >= 0) {
        occluded = true;
        break;
      }
    }
    if (!occluded) visible.push_back(p);
  }
  // Same seed, same candidate stream: the visible sets must match point for
  // point, in order.
  REQUIRE(partial.points.size() == visible.size());
  for (std::size_t i = 0; i < visible.size(); ++i) CHECK(partial.points[i] == visible[i]);
}

TEST_CASE("closest_point: exact cases and a dense-sampling oracle") {
  const TriMesh m = make_mesh(ShapeSpec::cube(0.2));
  const PointCloud surface = sample_full_cloud(m, 2000, 6);
  CHECK(closest_point(m, surface.points[0]).distance < 1e-12);
  // Point 1 m above the cube: top face at z = 0.1 in canonical coords.
  CHECK(closest_point(m, Eigen::Vector3d(0, 0, 1)).distance == doctest::Approx(0.9));

  const PointCloud dense = sample_full_cloud(m, 200000, 7);
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d x(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                            rng.uniform(-0.3, 0.3));
    const double exact = closest_point(m, x).distance;
    double sampled = 1e9;
    for (const auto& p : dense.points) sampled = std::min(sampled, (p - x).norm());
    CHECK(std::abs(exact - sampled) < 0.01);  // dense-sampling resolution
  }
}

TEST_CASE("partial cloud is positionally a subset of the surface") {
  const TriMesh m = make_mesh(ShapeSpec::cylinder(0.2, 0.1));
  const Posed pose = Posed::translation(0.05, -0.02, 0.1);
  const PointCloud cloud = sample_partial_cloud(m, pose, Eigen::Vector3d(1, 1, 1), 3000, 11);
  TriMesh world = m;
  for (auto& v : world.vertices) v = pose.apply(v);
  for (std::size_t i = 0; i < cloud.points.size(); i += 5)
    CHECK(closest_point(world, cloud.points[i]).distance < 1e-9);
}

TEST_CASE("convex hull of a square with interior points") {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}};
  const auto hull = convex_hull_xy(pts);
  CHECK(hull.size() == 4);
}
