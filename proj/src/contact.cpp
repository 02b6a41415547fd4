#include "pushcast/contact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pushcast {

std::string to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Manipulator: return "manipulator";
    case FrameKind::Environment: return "environment";
    case FrameKind::Position: return "position";
  }
  throw std::invalid_argument("unknown frame kind");
}

FrameKind frame_kind_from_string(const std::string& s) {
  if (s == "manipulator") return FrameKind::Manipulator;
  if (s == "environment") return FrameKind::Environment;
  if (s == "position") return FrameKind::Position;
  throw std::invalid_argument("unknown frame kind: " + s);
}

ManipulatorContactModel train_manipulator_contact_model(
    const std::vector<SurfaceFeature>& features, const TriMesh& link_mesh,
    const Posed& link_pose, const Posed& object_pose, double delta_c, double lambda_c,
    const std::string& shape_id, const std::string& link_mesh_id) {
  if (!(delta_c > 0)) throw std::invalid_argument("delta_c must be positive");

  TriMesh link_world = link_mesh;
  for (auto& v : link_world.vertices) v = link_pose.apply(v);
  const Posed link_inv = inverse(link_pose);

  ManipulatorContactModel model;
  model.shape_id = shape_id;
  model.link_mesh_id = link_mesh_id;
  for (const auto& f : features) {
    const ClosestPointResult cp = closest_point(link_world, f.v.p);
    if (cp.distance >= delta_c) continue;  // zero weight, frame omitted
    ContactFrame frame;
    frame.kind = FrameKind::Manipulator;
    frame.v = f.v;
    frame.r = f.r;
    const Eigen::Quaterniond vq_inv = f.v.q.conjugate();
    frame.u = Posed(vq_inv * (cp.point - f.v.p), vq_inv * link_pose.q);
    frame.h = compose(inverse(f.v), object_pose);
    frame.link_point = link_inv.apply(cp.point);
    frame.w = cp.distance <= 0 ? 1.0 : std::exp(-lambda_c * cp.distance * cp.distance);
    model.frames.push_back(std::move(frame));
  }
  if (model.frames.empty())
    throw std::runtime_error("manipulator contact model: no feature within the cut-off");
  return model;
}

double weight_z(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X) {
  if (X.empty()) throw std::invalid_argument("weight_z: empty feature set");
  double zmax = 0;
  for (const auto& f : X) zmax = std::max(zmax, f.v.p.z());
  if (zmax <= 0) return 1.0;  // degenerate flat cloud
  return std::exp(-x.v.p.z() / zmax);
}

double weight_cd(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X) {
  if (X.empty()) throw std::invalid_argument("weight_cd: empty feature set");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& f : X) centroid += f.v.p;
  centroid /= static_cast<double>(X.size());
  double dmax = 0;
  for (const auto& f : X) dmax = std::max(dmax, (f.v.p - centroid).squaredNorm());
  if (dmax <= 0) return 1.0;
  return (x.v.p - centroid).squaredNorm() / dmax;
}

double weight_ag(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X,
                 const std::vector<ContactFrame>& placed) {
  double w = 1.0;  // empty product
  for (const auto& c : placed) {
    double dmax = 0;
    for (const auto& f : X) dmax = std::max(dmax, (f.v.p - c.v.p).squaredNorm());
    if (dmax <= 0) return 0.0;
    w *= (x.v.p - c.v.p).squaredNorm() / dmax;
  }
  return w;
}

std::vector<ContactFrame> sample_environment_contacts(
    const std::vector<SurfaceFeature>& features, const Posed& object_pose, int n_contacts,
    Rng& rng) {
  if (features.empty()) throw std::invalid_argument("no surface features");
  if (n_contacts < 1) throw std::invalid_argument("n_contacts must be >= 1");
  const int n = static_cast<int>(features.size());

  // Static parts of the product PDF.
  double zmax = 0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& f : features) {
    zmax = std::max(zmax, f.v.p.z());
    centroid += f.v.p;
  }
  centroid /= static_cast<double>(n);
  double dmax = 0;
  for (const auto& f : features) dmax = std::max(dmax, (f.v.p - centroid).squaredNorm());

  std::vector<double> base(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = features[i].v.p;
    const double wz = zmax <= 0 ? 1.0 : std::exp(-p.z() / zmax);
    const double wcd = dmax <= 0 ? 1.0 : (p - centroid).squaredNorm() / dmax;
    base[i] = wz * wcd;
  }

  std::vector<ContactFrame> placed;
  std::vector<double> weight = base;
  for (int k = 0; k < n_contacts; ++k) {
    std::vector<double> cumulative(n);
    double total = 0;
    for (int i = 0; i < n; ++i) {
      total += weight[i];
      cumulative[i] = total;
    }
    int pick;
    if (total > 0) {
      const double u = rng.uniform() * total;
      pick = static_cast<int>(std::distance(
          cumulative.begin(), std::lower_bound(cumulative.begin(), cumulative.end(), u)));
      pick = std::min(pick, n - 1);
    } else {
      pick = static_cast<int>(rng.uniform_index(n));
    }

    const auto& f = features[pick];
    ContactFrame frame;
    frame.kind = FrameKind::Environment;
    frame.v = f.v;
    frame.r = f.r;
    frame.u = Posed(Eigen::Vector3d(0, 0, -f.v.p.z()), Eigen::Quaterniond::Identity());
    frame.h = compose(inverse(f.v), object_pose);
    frame.w = 1.0;
    placed.push_back(std::move(frame));

    // Grow the anti-grouping product with the new contact.
    double agmax = 0;
    for (const auto& g : features) agmax = std::max(agmax, (g.v.p - f.v.p).squaredNorm());
    for (int i = 0; i < n; ++i) {
      const double d2 = (features[i].v.p - f.v.p).squaredNorm();
      weight[i] *= agmax <= 0 ? 0.0 : d2 / agmax;
    }
  }
  return placed;
}

std::vector<ContactFrame> place_environment_contacts(
    const std::vector<SurfaceFeature>& features, const EnvironmentContactModel& model,
    int n_contacts, int n_samples, const Bandwidths& bw, TruncationConfig& trunc, Rng& rng,
    int max_model_kernels) {
  if (features.empty()) throw std::invalid_argument("no surface features");
  if (model.frames.empty()) throw std::invalid_argument("environment contact model is empty");
  if (n_contacts < 1 || n_samples < 1)
    throw std::invalid_argument("contact and sample counts must be >= 1");

  // Uniform-weight kernel bank from the model, optionally subsampled.
  std::vector<ContactKernel> kernels;
  const int total = static_cast<int>(model.frames.size());
  if (max_model_kernels > 0 && total > max_model_kernels) {
    Rng sub = rng.fork(0x656e76ull);
    kernels.reserve(max_model_kernels);
    const double stride = static_cast<double>(total) / max_model_kernels;
    for (int i = 0; i < max_model_kernels; ++i) {
      const int idx = std::min(total - 1, static_cast<int>(i * stride + sub.uniform() * stride));
      kernels.push_back({model.frames[idx].r, model.frames[idx].u, 1.0});
    }
  } else {
    kernels.reserve(total);
    for (const auto& f : model.frames) kernels.push_back({f.r, f.u, 1.0});
  }
  for (auto& k : kernels) k.weight = 1.0 / static_cast<double>(kernels.size());
  const ContactKernelMix mix = ContactKernelMix::from_kernels(kernels, bw);

  std::vector<ContactFrame> placed;
  for (int k = 0; k < n_contacts; ++k) {
    std::vector<int> candidates(n_samples);
    for (int s = 0; s < n_samples; ++s)
      candidates[s] = static_cast<int>(rng.uniform_index(features.size()));

    int best = -1;
    double best_score = 0;
    for (;;) {
      FailureStats stats;
      best = -1;
      best_score = 0;
      for (int s = 0; s < n_samples; ++s) {
        const auto& f = features[candidates[s]];
        const Posed u(Eigen::Vector3d(0, 0, -f.v.p.z()), Eigen::Quaterniond::Identity());
        const double score = mix.eval(f.r, u, trunc, &stats);
        if (score > best_score) {
          best_score = score;
          best = s;
        }
      }
      if (best >= 0) break;
      trunc = rescale_on_failure(trunc, stats);  // throws past the cap
    }

    const auto& f = features[candidates[best]];
    ContactFrame frame;
    frame.kind = FrameKind::Environment;
    frame.v = f.v;
    frame.r = f.r;
    frame.u = Posed(Eigen::Vector3d(0, 0, -f.v.p.z()), Eigen::Quaterniond::Identity());
    frame.h = Posed::identity();  // relation to the estimated pose is filled later
    frame.w = 1.0;
    placed.push_back(std::move(frame));
  }
  return placed;
}

PositionModel train_position_model(const std::vector<SurfaceFeature>& features,
                                   const Posed& object_pose, const Bandwidths& bw,
                                   const std::string& shape_id) {
  if (features.empty()) throw std::invalid_argument("no surface features");
  const Descriptord mean = mean_descriptor(features);

  PositionModel model;
  model.shape_id = shape_id;
  model.frames.reserve(features.size());
  double total = 0;
  for (const auto& f : features) {
    ContactFrame frame;
    frame.kind = FrameKind::Position;
    frame.v = f.v;
    frame.r = f.r;
    frame.u = compose(inverse(f.v), object_pose);
    frame.h = frame.u;
    frame.w = dist_r(f.r, mean, bw.sigma_r);
    total += frame.w;
    model.frames.push_back(std::move(frame));
  }
  if (total <= 0) {
    // All descriptors coincide (e.g. a sphere): fall back to uniform weights.
    const double uniform = 1.0 / static_cast<double>(model.frames.size());
    for (auto& f : model.frames) f.w = uniform;
  } else {
    for (auto& f : model.frames) f.w /= total;
  }
  return model;
}

}  // namespace pushcast
