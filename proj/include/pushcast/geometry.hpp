#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace pushcast {

// Surface descriptor: signed principal curvatures (r1, r2), r1 >= r2, in 1/m;
// concave geometry reads negative.
template <typename Scalar>
using Descriptor = Eigen::Matrix<Scalar, 2, 1>;

using Descriptord = Descriptor<double>;

/// Rigid-body pose in SE(3): translation p (metres) and unit quaternion q.
/// Quaternions are normalized on construction and after every composition;
/// serialized order is scalar-first [qw, qx, qy, qz].
template <typename Scalar>
struct Pose {
  Eigen::Matrix<Scalar, 3, 1> p{Eigen::Matrix<Scalar, 3, 1>::Zero()};
  Eigen::Quaternion<Scalar> q{Eigen::Quaternion<Scalar>::Identity()};

  Pose() = default;

  Pose(const Eigen::Matrix<Scalar, 3, 1>& translation,
       const Eigen::Quaternion<Scalar>& rotation)
      : p(translation), q(rotation.normalized()) {}

  static Pose identity() { return {}; }

  static Pose translation(Scalar x, Scalar y, Scalar z) {
    return {Eigen::Matrix<Scalar, 3, 1>(x, y, z),
            Eigen::Quaternion<Scalar>::Identity()};
  }

  static Pose rotation_z(Scalar angle_rad) {
    return {Eigen::Matrix<Scalar, 3, 1>::Zero(),
            Eigen::Quaternion<Scalar>(
                Eigen::AngleAxis<Scalar>(angle_rad, Eigen::Matrix<Scalar, 3, 1>::UnitZ()))};
  }

  static Pose from_axis_angle(const Eigen::Matrix<Scalar, 3, 1>& axis, Scalar angle_rad) {
    return {Eigen::Matrix<Scalar, 3, 1>::Zero(),
            Eigen::Quaternion<Scalar>(Eigen::AngleAxis<Scalar>(angle_rad, axis.normalized()))};
  }

  // Transform a point: R * x + p.
  Eigen::Matrix<Scalar, 3, 1> apply(const Eigen::Matrix<Scalar, 3, 1>& x) const {
    return q * x + p;
  }

  // Rotate a direction (no translation).
  Eigen::Matrix<Scalar, 3, 1> rotate(const Eigen::Matrix<Scalar, 3, 1>& d) const {
    return q * d;
  }

  Eigen::Matrix<Scalar, 4, 4> matrix() const {
    Eigen::Matrix<Scalar, 4, 4> m = Eigen::Matrix<Scalar, 4, 4>::Identity();
    m.template topLeftCorner<3, 3>() = q.toRotationMatrix();
    m.template topRightCorner<3, 1>() = p;
    return m;
  }
};

using Posed = Pose<double>;

// Group composition a then b applied right-to-left: (a o b)(x) = a(b(x)).
template <typename Scalar>
Pose<Scalar> compose(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return {a.p + a.q * b.p, (a.q * b.q).normalized()};
}

// v^-1 = (-q^-1 p, q^-1).
template <typename Scalar>
Pose<Scalar> inverse(const Pose<Scalar>& v) {
  Eigen::Quaternion<Scalar> qi = v.q.conjugate();
  return {-(qi * v.p), qi};
}

template <typename Scalar>
Scalar quaternion_abs_dot(const Eigen::Quaternion<Scalar>& a,
                          const Eigen::Quaternion<Scalar>& b) {
  return std::abs(a.coeffs().dot(b.coeffs()));
}

// Antipodal-invariant rotation distance 1 - |<q1,q2>|, unscaled.
template <typename Scalar>
Scalar quaternion_distance(const Eigen::Quaternion<Scalar>& a,
                           const Eigen::Quaternion<Scalar>& b) {
  return Scalar(1) - quaternion_abs_dot(a, b);
}

// Geodesic angle between two rotations, radians in [0, pi].
template <typename Scalar>
Scalar rotation_angle(const Eigen::Quaternion<Scalar>& a,
                      const Eigen::Quaternion<Scalar>& b) {
  Scalar d = std::min(quaternion_abs_dot(a, b), Scalar(1));
  return Scalar(2) * std::acos(d);
}

// ||p - mu||^2 / sigma
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dist_p(const Eigen::MatrixBase<DerivedA>& p,
                                 const Eigen::MatrixBase<DerivedB>& mu,
                                 typename DerivedA::Scalar sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("dist_p: bandwidth must be positive");
  return (p - mu).squaredNorm() / sigma;
}

// (1 - |<q, mu>|) / sigma
template <typename Scalar>
Scalar dist_q(const Eigen::Quaternion<Scalar>& q,
              const Eigen::Quaternion<Scalar>& mu, Scalar sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("dist_q: bandwidth must be positive");
  return quaternion_distance(q, mu) / sigma;
}

// (r - mu)^T diag(1/sigma) (r - mu)
template <typename Scalar>
Scalar dist_r(const Descriptor<Scalar>& r, const Descriptor<Scalar>& mu,
              const Descriptor<Scalar>& sigma) {
  if (!(sigma.minCoeff() > 0)) throw std::invalid_argument("dist_r: bandwidth must be positive");
  Descriptor<Scalar> d = r - mu;
  return d.cwiseProduct(d).cwiseQuotient(sigma).sum();
}

// Pose equality helpers used by invariants and tests.
template <typename Scalar>
bool approx_identity(const Pose<Scalar>& v, Scalar tol = Scalar(1e-9)) {
  return v.p.norm() <= tol && quaternion_distance(v.q, Eigen::Quaternion<Scalar>::Identity()) <= tol;
}

template <typename Scalar>
bool approx_equal(const Pose<Scalar>& a, const Pose<Scalar>& b, Scalar tol = Scalar(1e-9)) {
  return (a.p - b.p).norm() <= tol && quaternion_distance(a.q, b.q) <= tol;
}

}  // namespace pushcast
