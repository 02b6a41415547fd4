#pragma once

#include <string>
#include <vector>

#include "pushcast/geometry.hpp"
#include "pushcast/rng.hpp"

namespace pushcast {

struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3i> triangles;
  Eigen::Vector3d dims{Eigen::Vector3d::Zero()};  // bounding-box extents

  Eigen::Vector3d triangle_normal(int t) const;
  double triangle_area(int t) const;
  double surface_area() const;
  double signed_volume() const;
  Eigen::Vector3d volume_centroid() const;
};

enum class ShapeKind { Cube, Box, Cylinder, Hybrid, NotchedCube };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& s);

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Cube;
  Eigen::Vector3d dimensions{0.2, 0.2, 0.2};
  int segments = 64;  // facet count for curved shapes

  static ShapeSpec cube(double edge);
  static ShapeSpec box(double dx, double dy, double dz);
  static ShapeSpec cylinder(double height, double radius, int segments = 64);
  static ShapeSpec hybrid(double edge, int segments = 64);
  static ShapeSpec notched_cube(double edge);

  std::string symmetry_class() const;
  std::string label() const;
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;  // outward orientation hints; may be empty
  Posed source_pose;                     // object pose at capture time
  bool has_viewpoint = false;
  Eigen::Vector3d viewpoint{Eigen::Vector3d::Zero()};

  Eigen::Vector3d centroid() const;
};

/// Builds a watertight mesh at the canonical pose: volume centroid on the z
/// axis at x = y = 0, resting face on the z = -dims_z/2 plane.
TriMesh make_mesh(const ShapeSpec& spec);

/// Area-weighted uniform surface samples, deterministic per seed.
/// density is in points per square metre.
PointCloud sample_full_cloud(const TriMesh& mesh, double density, std::uint64_t seed);

/// Single-view capture: keeps samples whose outward normal faces the viewpoint
/// and that pass a ray occlusion test against the whole mesh.
PointCloud sample_partial_cloud(const TriMesh& mesh, const Posed& pose,
                                const Eigen::Vector3d& viewpoint, double density,
                                std::uint64_t seed);

struct ClosestPointResult {
  Eigen::Vector3d point;
  double distance = 0.0;
  int triangle = -1;
};

/// Exact point-to-mesh minimum over all triangles.
ClosestPointResult closest_point(const TriMesh& mesh, const Eigen::Vector3d& x);

/// Moeller-Trumbore; returns parameter t along dir (>= 0) or a negative value.
double ray_triangle(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                    const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                    const Eigen::Vector3d& c);

bool point_inside_mesh(const TriMesh& mesh, const Eigen::Vector3d& x);

/// 2D convex hull (monotone chain) of the xy projection, counterclockwise.
std::vector<Eigen::Vector2d> convex_hull_xy(const std::vector<Eigen::Vector2d>& pts);

}  // namespace pushcast
