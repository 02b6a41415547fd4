#include "pushcast/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pushcast {

namespace {

constexpr double kPi = std::numbers::pi;

// Builder with positional vertex welding so shared edges match exactly.
struct MeshBuilder {
  TriMesh mesh;
  std::map<std::array<double, 3>, int> index;

  int vertex(const Eigen::Vector3d& v) {
    std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(v);
    index.emplace(key, id);
    return id;
  }

  void tri(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    mesh.triangles.emplace_back(vertex(a), vertex(b), vertex(c));
  }

  // Outward order: a, b, c, d counterclockwise seen from outside.
  void quad(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
            const Eigen::Vector3d& d) {
    tri(a, b, c);
    tri(a, c, d);
  }
};

void finalize(TriMesh& mesh) {
  const Eigen::Vector3d com = mesh.volume_centroid();
  for (auto& v : mesh.vertices) {
    v.x() -= com.x();
    v.y() -= com.y();
  }
  Eigen::Vector3d lo = mesh.vertices.front();
  Eigen::Vector3d hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double zshift = -(hi.z() - lo.z()) / 2.0 - lo.z();
  for (auto& v : mesh.vertices) v.z() += zshift;
  mesh.dims = hi - lo;
}

TriMesh make_box(double dx, double dy, double dz) {
  MeshBuilder b;
  const double x = dx / 2, y = dy / 2, z = dz / 2;
  const Eigen::Vector3d v000(-x, -y, -z), v100(x, -y, -z), v010(-x, y, -z), v110(x, y, -z);
  const Eigen::Vector3d v001(-x, -y, z), v101(x, -y, z), v011(-x, y, z), v111(x, y, z);
  b.quad(v000, v010, v110, v100);  // bottom, normal -z
  b.quad(v001, v101, v111, v011);  // top
  b.quad(v000, v100, v101, v001);  // -y
  b.quad(v110, v010, v011, v111);  // +y
  b.quad(v010, v000, v001, v011);  // -x
  b.quad(v100, v110, v111, v101);  // +x
  finalize(b.mesh);
  return b.mesh;
}

TriMesh make_cylinder(double height, double radius, int segments) {
  MeshBuilder b;
  const double z0 = -height / 2, z1 = height / 2;
  const Eigen::Vector3d bc(0, 0, z0), tc(0, 0, z1);
  std::vector<Eigen::Vector2d> ring(segments);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * kPi * i / segments;
    ring[i] = {radius * std::cos(a), radius * std::sin(a)};
  }
  for (int i = 0; i < segments; ++i) {
    const Eigen::Vector2d &r0 = ring[i], &r1 = ring[(i + 1) % segments];
    const Eigen::Vector3d p0(r0.x(), r0.y(), z0), p1(r1.x(), r1.y(), z0);
    const Eigen::Vector3d q0(r0.x(), r0.y(), z1), q1(r1.x(), r1.y(), z1);
    b.quad(p0, p1, q1, q0);  // side
    b.tri(bc, p1, p0);       // bottom cap
    b.tri(tc, q0, q1);       // top cap
  }
  finalize(b.mesh);
  return b.mesh;
}

// Cross-section: semicircle (radius e/2) on -x joined to an isosceles
// triangle with apex at +e/2, extruded over the height e.
TriMesh make_hybrid(double edge, int segments) {
  const double r = edge / 2;
  std::vector<Eigen::Vector2d> poly;
  poly.emplace_back(r, 0.0);  // apex
  const int arc = std::max(4, segments / 2);
  for (int i = 0; i <= arc; ++i) {
    const double a = kPi / 2 + kPi * i / arc;  // 90 to 270 degrees
    poly.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  MeshBuilder b;
  const double z0 = -edge / 2, z1 = edge / 2;
  Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
  for (const auto& p : poly) c2 += p;
  c2 /= static_cast<double>(poly.size());
  const Eigen::Vector3d bc(c2.x(), c2.y(), z0), tc(c2.x(), c2.y(), z1);
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % n];
    const Eigen::Vector3d p0(p.x(), p.y(), z0), q0(q.x(), q.y(), z0);
    const Eigen::Vector3d p1(p.x(), p.y(), z1), q1(q.x(), q.y(), z1);
    b.quad(p0, q0, q1, p1);  // wall (polygon is counterclockwise)
    b.tri(bc, q0, p0);       // bottom
    b.tri(tc, p1, q1);       // top
  }
  finalize(b.mesh);
  return b.mesh;
}

// Cube with a corner cube of volume edge^3/16 removed from the (+,+,+)
// corner; the notch edge is edge/2 * cbrt(1/2). Built as a 2x2x2 cell
// lattice with the corner cell dropped so that every boundary quad shares
// full edges with its neighbours.
TriMesh make_notched_cube(double edge) {
  MeshBuilder b;
  const double s = edge / 2;
  const double a = s * std::cbrt(0.5);
  const double grid[3] = {-s, s - a, s};

  auto removed = [](int i, int j, int k) { return i == 1 && j == 1 && k == 1; };
  auto solid = [&](int i, int j, int k) {
    return i >= 0 && i < 2 && j >= 0 && j < 2 && k >= 0 && k < 2 && !removed(i, j, k);
  };

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (removed(i, j, k)) continue;
        const double x0 = grid[i], x1 = grid[i + 1];
        const double y0 = grid[j], y1 = grid[j + 1];
        const double z0 = grid[k], z1 = grid[k + 1];
        auto P = [&](double x, double y, double z) { return Eigen::Vector3d(x, y, z); };
        if (!solid(i - 1, j, k))
          b.quad(P(x0, y0, z0), P(x0, y0, z1), P(x0, y1, z1), P(x0, y1, z0));
        if (!solid(i + 1, j, k))
          b.quad(P(x1, y0, z0), P(x1, y1, z0), P(x1, y1, z1), P(x1, y0, z1));
        if (!solid(i, j - 1, k))
          b.quad(P(x0, y0, z0), P(x1, y0, z0), P(x1, y0, z1), P(x0, y0, z1));
        if (!solid(i, j + 1, k))
          b.quad(P(x0, y1, z0), P(x0, y1, z1), P(x1, y1, z1), P(x1, y1, z0));
        if (!solid(i, j, k - 1))
          b.quad(P(x0, y0, z0), P(x0, y1, z0), P(x1, y1, z0), P(x1, y0, z0));
        if (!solid(i, j, k + 1))
          b.quad(P(x0, y0, z1), P(x1, y0, z1), P(x1, y1, z1), P(x0, y1, z1));
      }
    }
  }
  finalize(b.mesh);
  return b.mesh;
}

}  // namespace

Eigen::Vector3d TriMesh::triangle_normal(int t) const {
  const auto& tr = triangles[t];
  const Eigen::Vector3d e1 = vertices[tr[1]] - vertices[tr[0]];
  const Eigen::Vector3d e2 = vertices[tr[2]] - vertices[tr[0]];
  Eigen::Vector3d n = e1.cross(e2);
  const double len = n.norm();
  return len > 0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::UnitZ();
}

double TriMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * (vertices[tr[1]] - vertices[tr[0]])
                   .cross(vertices[tr[2]] - vertices[tr[0]])
                   .norm();
}

double TriMesh::surface_area() const {
  double a = 0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) a += triangle_area(t);
  return a;
}

double TriMesh::signed_volume() const {
  double v = 0;
  for (const auto& tr : triangles)
    v += vertices[tr[0]].dot(vertices[tr[1]].cross(vertices[tr[2]])) / 6.0;
  return v;
}

Eigen::Vector3d TriMesh::volume_centroid() const {
  double vol = 0;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& tr : triangles) {
    const Eigen::Vector3d &a = vertices[tr[0]], &b = vertices[tr[1]], &d = vertices[tr[2]];
    const double v = a.dot(b.cross(d)) / 6.0;
    vol += v;
    c += v * (a + b + d) / 4.0;
  }
  return vol != 0 ? Eigen::Vector3d(c / vol) : Eigen::Vector3d::Zero();
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Cube: return "cube";
    case ShapeKind::Box: return "box";
    case ShapeKind::Cylinder: return "cylinder";
    case ShapeKind::Hybrid: return "hybrid";
    case ShapeKind::NotchedCube: return "notched-cube";
  }
  throw std::invalid_argument("unknown shape kind");
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "cube") return ShapeKind::Cube;
  if (s == "box") return ShapeKind::Box;
  if (s == "cylinder") return ShapeKind::Cylinder;
  if (s == "hybrid" || s == "hybrid-halfcylinder-prism") return ShapeKind::Hybrid;
  if (s == "notched-cube") return ShapeKind::NotchedCube;
  throw std::invalid_argument("unknown shape kind: " + s);
}

ShapeSpec ShapeSpec::cube(double edge) {
  return {ShapeKind::Cube, Eigen::Vector3d::Constant(edge)};
}

ShapeSpec ShapeSpec::box(double dx, double dy, double dz) {
  return {ShapeKind::Box, Eigen::Vector3d(dx, dy, dz)};
}

ShapeSpec ShapeSpec::cylinder(double height, double radius, int segments) {
  return {ShapeKind::Cylinder, Eigen::Vector3d(2 * radius, 2 * radius, height), segments};
}

ShapeSpec ShapeSpec::hybrid(double edge, int segments) {
  return {ShapeKind::Hybrid, Eigen::Vector3d::Constant(edge), segments};
}

ShapeSpec ShapeSpec::notched_cube(double edge) {
  return {ShapeKind::NotchedCube, Eigen::Vector3d::Constant(edge)};
}

std::string ShapeSpec::symmetry_class() const {
  switch (kind) {
    case ShapeKind::Cube: return "cube24";
    case ShapeKind::Box: {
      const bool xy = std::abs(dimensions.x() - dimensions.y()) < 1e-12;
      const bool xz = std::abs(dimensions.x() - dimensions.z()) < 1e-12;
      const bool yz = std::abs(dimensions.y() - dimensions.z()) < 1e-12;
      if (xy && xz) return "cube24";
      return (xy || xz || yz) ? "box8" : "box4";
    }
    case ShapeKind::Cylinder: return "cylinder-continuous";
    case ShapeKind::Hybrid: return "mirror2";
    case ShapeKind::NotchedCube: return "diagonal3";
  }
  return "none";
}

std::string ShapeSpec::label() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%g_%g_%g", to_string(kind).c_str(), dimensions.x(),
                dimensions.y(), dimensions.z());
  return buf;
}

Eigen::Vector3d PointCloud::centroid() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : points) c += p;
  return points.empty() ? c : Eigen::Vector3d(c / static_cast<double>(points.size()));
}

TriMesh make_mesh(const ShapeSpec& spec) {
  if (spec.dimensions.minCoeff() <= 0) throw std::invalid_argument("shape dimensions must be positive");
  switch (spec.kind) {
    case ShapeKind::Cube:
      return make_box(spec.dimensions.x(), spec.dimensions.x(), spec.dimensions.x());
    case ShapeKind::Box:
      return make_box(spec.dimensions.x(), spec.dimensions.y(), spec.dimensions.z());
    case ShapeKind::Cylinder:
      return make_cylinder(spec.dimensions.z(), spec.dimensions.x() / 2, spec.segments);
    case ShapeKind::Hybrid:
      return make_hybrid(spec.dimensions.x(), spec.segments);
    case ShapeKind::NotchedCube:
      return make_notched_cube(spec.dimensions.x());
  }
  throw std::invalid_argument("unknown shape kind");
}

PointCloud sample_full_cloud(const TriMesh& mesh, double density, std::uint64_t seed) {
  if (!(density > 0)) throw std::invalid_argument("cloud density must be positive");
  const double area = mesh.surface_area();
  const long n = std::max<long>(1, std::lround(area * density));

  std::vector<double> cumulative(mesh.triangles.size());
  double acc = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    acc += mesh.triangle_area(static_cast<int>(t));
    cumulative[t] = acc;
  }

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.normals.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double pick = rng.uniform() * acc;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const int t = static_cast<int>(std::distance(cumulative.begin(), it));
    const auto& tr = mesh.triangles[t];
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1) {
      u = 1 - u;
      v = 1 - v;
    }
    cloud.points.push_back(mesh.vertices[tr[0]] +
                           u * (mesh.vertices[tr[1]] - mesh.vertices[tr[0]]) +
                           v * (mesh.vertices[tr[2]] - mesh.vertices[tr[0]]));
    cloud.normals.push_back(mesh.triangle_normal(t));
  }
  return cloud;
}

double ray_triangle(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                    const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                    const Eigen::Vector3d& c) {
  constexpr double eps = 1e-12;
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  const Eigen::Vector3d h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < eps) return -1;
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = origin - a;
  const double u = inv * s.dot(h);
  if (u < 0 || u > 1) return -1;
  const Eigen::Vector3d q = s.cross(e1);
  const double v = inv * dir.dot(q);
  if (v < 0 || u + v > 1) return -1;
  const double t = inv * e2.dot(q);
  return t >= 0 ? t : -1;
}

bool point_inside_mesh(const TriMesh& mesh, const Eigen::Vector3d& x) {
  // Parity of crossings along a fixed, unlikely-degenerate direction.
  const Eigen::Vector3d dir = Eigen::Vector3d(0.577350269, 0.711324865, 0.401293874).normalized();
  int crossings = 0;
  for (const auto& tr : mesh.triangles) {
    const double t = ray_triangle(x, dir, mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                                  mesh.vertices[tr[2]]);
    if (t > 1e-12) ++crossings;
  }
  return crossings % 2 == 1;
}

PointCloud sample_partial_cloud(const TriMesh& mesh, const Posed& pose,
                                const Eigen::Vector3d& viewpoint, double density,
                                std::uint64_t seed) {
  // World-frame copy of the mesh.
  TriMesh world = mesh;
  for (auto& v : world.vertices) v = pose.apply(v);
  if (point_inside_mesh(world, viewpoint))
    throw std::invalid_argument("viewpoint lies inside the mesh");

  const PointCloud full = sample_full_cloud(world, density, seed);
  PointCloud cloud;
  cloud.source_pose = pose;
  cloud.has_viewpoint = true;
  cloud.viewpoint = viewpoint;
  for (std::size_t i = 0; i < full.points.size(); ++i) {
    const Eigen::Vector3d& p = full.points[i];
    const Eigen::Vector3d& n = full.normals[i];
    Eigen::Vector3d to_view = viewpoint - p;
    const double range = to_view.norm();
    if (n.dot(to_view) <= 1e-9) continue;  // back-facing
    to_view /= range;
    const Eigen::Vector3d origin = p + 1e-6 * to_view;
    bool occluded = false;
    for (const auto& tr : world.triangles) {
      const double t = ray_triangle(origin, to_view, world.vertices[tr[0]],
                                    world.vertices[tr[1]], world.vertices[tr[2]]);
      if (t > 0 && t < range - 1e-6) {
        occluded = true;
        break;
      }
    }
    if (occluded) continue;
    cloud.points.push_back(p);
    cloud.normals.push_back(n);
  }
  return cloud;
}

namespace {

Eigen::Vector3d closest_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                    const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  // Ericson, Real-Time Collision Detection 5.1.5.
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

ClosestPointResult closest_point(const TriMesh& mesh, const Eigen::Vector3d& x) {
  ClosestPointResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    const Eigen::Vector3d q = closest_on_triangle(x, mesh.vertices[tr[0]],
                                                  mesh.vertices[tr[1]], mesh.vertices[tr[2]]);
    const double d = (q - x).norm();
    if (d < best.distance) {
      best = {q, d, t};
    }
  }
  return best;
}

std::vector<Eigen::Vector2d> convex_hull_xy(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Eigen::Vector2d> p = pts;
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end(),
                      [](const auto& a, const auto& b) { return a == b; }),
          p.end());
  if (p.size() < 3) return p;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {  // lower hull
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 1e-14) --k;
    hull[k++] = p[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = p.size() - 1; i-- > 0;) {  // upper hull
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 1e-14) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace pushcast
