#include "pushcast/features.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace pushcast {

namespace {

// Reference tangent for orienting principal directions. Flat and umbilic
// patches have no intrinsic principal direction, so without this the frame's
// spin about the normal would be noise and relational poses would not
// transfer. Near-vertical patches use the world vertical; near-horizontal
// ones use the radial direction from the cloud centroid, which rotates with
// the object and keeps the frames equivariant under planar motion.
Eigen::Vector3d canonical_tangent(const Eigen::Vector3d& normal, const Eigen::Vector3d& radial) {
  Eigen::Vector3d ref = Eigen::Vector3d::UnitZ();
  if (std::abs(normal.z()) >= 0.9) {
    ref = radial;
    if (ref.norm() < 1e-9) ref = Eigen::Vector3d::UnitX();
  }
  Eigen::Vector3d t = ref - ref.dot(normal) * normal;
  if (t.norm() < 1e-9) t = Eigen::Vector3d::UnitX() - normal.x() * normal;
  return t.normalized();
}

}  // namespace

std::vector<SurfaceFeature> extract_features(const PointCloud& cloud,
                                             const FeatureParams& params) {
  const auto& pts = cloud.points;
  const int n = static_cast<int>(pts.size());
  if (n == 0) throw std::invalid_argument("extract_features: empty cloud");
  const double r2 = params.neighborhood_radius * params.neighborhood_radius;
  const Eigen::Vector3d cloud_center = cloud.centroid();

  std::vector<SurfaceFeature> features;
  features.reserve(pts.size());
  std::vector<int> nbrs;
  for (int i = 0; i < n; ++i) {
    nbrs.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i && (pts[j] - pts[i]).squaredNorm() <= r2) nbrs.push_back(j);
    }
    if (static_cast<int>(nbrs.size()) < params.min_neighbors) continue;

    Eigen::Vector3d mean = pts[i];
    for (int j : nbrs) mean += pts[j];
    mean /= static_cast<double>(nbrs.size() + 1);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    {
      Eigen::Vector3d d = pts[i] - mean;
      cov += d * d.transpose();
    }
    for (int j : nbrs) {
      Eigen::Vector3d d = pts[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d normal = eig.eigenvectors().col(0);  // smallest eigenvalue

    // Orientation: sampled-mesh hint, else viewpoint, else away from the cloud.
    Eigen::Vector3d hint;
    if (i < static_cast<int>(cloud.normals.size()))
      hint = cloud.normals[i];
    else if (cloud.has_viewpoint)
      hint = cloud.viewpoint - pts[i];
    else
      hint = pts[i] - cloud_center;
    if (normal.dot(hint) < 0) normal = -normal;

    // Quadric height field in the tangent frame:
    // w = a u^2 + b uv + c v^2 + d u + e v + f.
    const Eigen::Vector3d t1 = canonical_tangent(normal, pts[i] - cloud_center);
    const Eigen::Vector3d t2 = normal.cross(t1);
    const int m = static_cast<int>(nbrs.size()) + 1;
    Eigen::MatrixXd A(m, 6);
    Eigen::VectorXd rhs(m);
    for (int k = 0; k < m; ++k) {
      const Eigen::Vector3d d = (k == 0 ? pts[i] : pts[nbrs[k - 1]]) - pts[i];
      const double u = d.dot(t1), v = d.dot(t2), w = d.dot(normal);
      A.row(k) << u * u, u * v, v * v, u, v, 1.0;
      rhs(k) = w;
    }
    const Eigen::VectorXd sol = (A.transpose() * A)
                                    .ldlt()
                                    .solve(A.transpose() * rhs);
    const double a = sol(0), b = sol(1), c = sol(2), du = sol(3), dv = sol(4);

    // Shape operator of the graph surface at the origin. The height field is
    // measured along the outward normal, under which convex geometry fits
    // negative; the sign is flipped so convex curvature reads positive.
    const double wgt = -1.0 / std::sqrt(1.0 + du * du + dv * dv);
    Eigen::Matrix2d second;
    second << 2 * a, b, b, 2 * c;
    second *= wgt;
    Eigen::Matrix2d first;
    first << 1 + du * du, du * dv, du * dv, 1 + dv * dv;
    const Eigen::Matrix2d shape = first.inverse() * second;

    // Eigen-decomposition of the (generally non-symmetric) 2x2 operator.
    const double tr = shape.trace();
    const double det = shape.determinant();
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    double k1 = tr / 2 + disc, k2 = tr / 2 - disc;

    Eigen::Vector2d dir1;
    if (std::abs(shape(0, 1)) > 1e-12)
      dir1 = Eigen::Vector2d(shape(0, 1), k1 - shape(0, 0)).normalized();
    else if (std::abs(shape(1, 0)) > 1e-12)
      dir1 = Eigen::Vector2d(k1 - shape(1, 1), shape(1, 0)).normalized();
    else
      dir1 = std::abs(shape(0, 0) - k1) < std::abs(shape(1, 1) - k1)
                 ? Eigen::Vector2d(1, 0)
                 : Eigen::Vector2d(0, 1);

    if (k2 > k1) {
      std::swap(k1, k2);
      dir1 = Eigen::Vector2d(-dir1.y(), dir1.x());
    }

    Eigen::Vector3d k1dir;
    if (std::abs(k1 - k2) < params.umbilic_threshold) {
      k1dir = t1;  // no reliable principal direction
    } else {
      k1dir = (dir1.x() * t1 + dir1.y() * t2).normalized();
      // Deterministic sign: align with the canonical tangent, falling back to
      // its perpendicular when the direction is near-orthogonal to it. The
      // band must sit well above fit noise or the winding flips at random
      // and relational poses stop transferring.
      const double along = k1dir.dot(t1);
      if (along < -0.1 || (std::abs(along) <= 0.1 && k1dir.dot(normal.cross(t1)) < 0))
        k1dir = -k1dir;
    }
    k1dir = (k1dir - k1dir.dot(normal) * normal).normalized();
    const Eigen::Vector3d k2dir = normal.cross(k1dir);

    Eigen::Matrix3d frame;
    frame.col(0) = k1dir;
    frame.col(1) = k2dir;
    frame.col(2) = normal;

    SurfaceFeature f;
    f.v = Posed(pts[i], Eigen::Quaterniond(frame));
    f.r = Descriptord(k1, k2);  // signed: concave geometry reads negative
    features.push_back(std::move(f));
  }
  if (features.empty())
    throw std::runtime_error("extract_features: no point has enough neighbors");
  return features;
}

Descriptord mean_descriptor(const std::vector<SurfaceFeature>& features) {
  Descriptord m = Descriptord::Zero();
  for (const auto& f : features) m += f.r;
  return features.empty() ? m : Descriptord(m / static_cast<double>(features.size()));
}

}  // namespace pushcast
