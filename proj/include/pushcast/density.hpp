#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushcast/features.hpp"
#include "pushcast/geometry.hpp"
#include "pushcast/rng.hpp"

namespace pushcast {

struct Bandwidths {
  double sigma_p = 1e-3;                   // translation, divides squared metres
  double sigma_q = 0.05;                   // rotation, divides quaternion distance
  Descriptord sigma_r{600.0, 600.0};       // descriptor, divides squared 1/m
  double sigma_pm = 0.02;                  // motion translation
  double sigma_qm = 0.05;                  // motion rotation
};

/// Cut-off distances and the trial-round state driving bandwidth rescaling.
/// beta = alpha_t^-T per component; a kernel term is zero once beta*d >= delta.
struct TruncationConfig {
  double delta_p = 5.0;
  double delta_q = 5.0;
  double delta_r = 0.1;
  double alpha_t = 2.0;
  int t_p = 0;
  int t_q = 0;
  int t_r = 0;
  int max_rounds = 10;

  double beta_p() const { return std::pow(alpha_t, -t_p); }
  double beta_q() const { return std::pow(alpha_t, -t_q); }
  double beta_r() const { return std::pow(alpha_t, -t_r); }
  int rounds() const { return t_p + t_q + t_r; }
};

/// Zero-likelihood contribution counts from one trial round.
struct FailureStats {
  long zero_p = 0;
  long zero_q = 0;
  long zero_r = 0;
  void clear() { zero_p = zero_q = zero_r = 0; }
};

struct RescaleCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Increments exactly one trial-round counter: the smallest counter, ties
/// broken by the component that produced the most zero likelihoods, then by
/// p, q, r order. Throws RescaleCapExceeded past max_rounds.
TruncationConfig rescale_on_failure(const TruncationConfig& trunc, const FailureStats& stats);

struct FeatureKernel {
  SurfaceFeature mu;
  double weight = 0.0;
};

struct ContactKernel {
  Descriptord mu_r{Descriptord::Zero()};
  Posed mu_u;
  double weight = 0.0;
};

struct MotionKernel {
  ContactKernel contact;
  Posed mu_m;
};

double eval_gauss3(const Eigen::Vector3d& p, const Eigen::Vector3d& mu, double sigma,
                   const TruncationConfig& trunc);
double eval_vmf(const Eigen::Quaterniond& q, const Eigen::Quaterniond& mu, double sigma,
                const TruncationConfig& trunc);
double eval_gauss2(const Descriptord& r, const Descriptord& mu, const Descriptord& sigma,
                   const TruncationConfig& trunc);

double eval_feature_density(std::span<const FeatureKernel> kernels, const SurfaceFeature& x,
                            const Bandwidths& bw, const TruncationConfig& trunc,
                            FailureStats* stats = nullptr);

double eval_contact_density(std::span<const ContactKernel> kernels, const Descriptord& r,
                            const Posed& u, const Bandwidths& bw, const TruncationConfig& trunc,
                            FailureStats* stats = nullptr);

/// Conditional density of Eq-style motion kernels: weighted motion terms
/// gated by contact similarity, divided by the contact marginal. Throws if
/// the marginal is zero.
double eval_motion_density(std::span<const MotionKernel> kernels, const Descriptord& r,
                           const Posed& u, const Posed& m, const Bandwidths& bw,
                           const TruncationConfig& trunc);

/// Column-packed SE(3) kernel mixture for annealing scores. Descriptor terms
/// are intentionally absent: query densities encode them in the weights.
struct PoseKernelMix {
  Eigen::Matrix3Xd P;
  Eigen::Matrix4Xd Q;  // quaternion coefficients, Eigen (x,y,z,w) order
  Eigen::VectorXd w;
  double sigma_p = 1e-3;
  double sigma_q = 0.05;

  int size() const { return static_cast<int>(w.size()); }
  double eval(const Posed& pose, const TruncationConfig& trunc,
              FailureStats* stats = nullptr) const;
};

/// Column-packed descriptor+relation kernel bank for contact densities.
struct ContactKernelMix {
  Eigen::Matrix3Xd Up;
  Eigen::Matrix4Xd Uq;
  Eigen::Matrix2Xd R;
  Eigen::VectorXd w;
  double sigma_p = 1e-3;
  double sigma_q = 0.05;
  Descriptord sigma_r{600.0, 600.0};

  static ContactKernelMix from_kernels(std::span<const ContactKernel> kernels,
                                       const Bandwidths& bw);
  int size() const { return static_cast<int>(w.size()); }
  double eval(const Descriptord& r, const Posed& u, const TruncationConfig& trunc,
              FailureStats* stats = nullptr) const;
  /// Per-kernel unnormalized responsibilities for a fixed query (r, u).
  Eigen::VectorXd responsibilities(const Descriptord& r, const Posed& u,
                                   const TruncationConfig& trunc,
                                   FailureStats* stats = nullptr) const;
};

struct WeightedPose {
  Posed pose;
  double weight = 1.0;
};

struct AnnealConfig {
  int candidates = 500;
  int steps = 100;
  double temp_start = 1.0;
  double temp_end = 1e-3;
  double trans_std = 0.1;  // metres at temperature 1
  double rot_std = 0.2;    // radians at temperature 1
  bool planar = true;      // proposals move x, y, yaw only
  int jobs = 1;
};

struct AnnealResult {
  Posed pose;
  double score = 0.0;
};

/// Maximizes score over SE(3). Chains start from a discrete sample of the
/// seeds; every seed is also scored directly, so the result never falls below
/// the best seed. Deterministic per rng regardless of jobs.
AnnealResult anneal(const std::function<double(const Posed&)>& score,
                    const std::vector<WeightedPose>& seeds, const AnnealConfig& config,
                    Rng& rng);

}  // namespace pushcast
