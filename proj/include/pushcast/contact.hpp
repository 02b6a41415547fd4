#pragma once

#include <string>
#include <vector>

#include "pushcast/density.hpp"
#include "pushcast/features.hpp"
#include "pushcast/shapes.hpp"

namespace pushcast {

enum class FrameKind { Manipulator, Environment, Position };

std::string to_string(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& s);

/// Surface feature augmented with a relational pose. u is expressed in the
/// feature frame for manipulator and position frames (kernels later sit at
/// compose(v, u)); environment frames store the world-axis drop to the floor
/// (0, 0, -z). h relates the frame to the object origin: h = v^-1 o B^O.
struct ContactFrame {
  Posed v;
  Descriptord r{Descriptord::Zero()};
  Posed u;
  Posed h;
  FrameKind kind = FrameKind::Manipulator;
  double w = 0.0;
  // Manipulator frames only: closest pusher point in link-local coordinates,
  // used to reconstruct a pusher placement from a chosen contact.
  Eigen::Vector3d link_point{Eigen::Vector3d::Zero()};
};

struct ManipulatorContactModel {
  std::vector<ContactFrame> frames;
  std::string shape_id;
  std::string link_mesh_id;
};

struct EnvironmentContactModel {
  std::vector<ContactFrame> frames;  // accumulated from training push records
};

struct PositionModel {
  std::vector<ContactFrame> frames;  // u = h, weights normalized
  std::string shape_id;
};

/// Weights features by proximity of the pusher link: 1 at exact contact,
/// exp(-lambda_c * d^2) inside the cut-off, omitted at d >= delta_c.
ManipulatorContactModel train_manipulator_contact_model(
    const std::vector<SurfaceFeature>& features, const TriMesh& link_mesh,
    const Posed& link_pose, const Posed& object_pose, double delta_c, double lambda_c,
    const std::string& shape_id, const std::string& link_mesh_id);

double weight_z(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X);
double weight_cd(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X);
double weight_ag(const SurfaceFeature& x, const std::vector<SurfaceFeature>& X,
                 const std::vector<ContactFrame>& placed);

/// Training-time placement: sequential draws from the w_Z * w_CD * w_AG
/// product, anti-grouping recomputed after each draw. u = (0, 0, -z).
std::vector<ContactFrame> sample_environment_contacts(
    const std::vector<SurfaceFeature>& features, const Posed& object_pose, int n_contacts,
    Rng& rng);

/// Prediction-time placement: each contact is the argmax of the environment
/// contact density over n_samples uniform candidates. A round in which every
/// candidate scores zero triggers bandwidth rescaling on trunc.
std::vector<ContactFrame> place_environment_contacts(
    const std::vector<SurfaceFeature>& features, const EnvironmentContactModel& model,
    int n_contacts, int n_samples, const Bandwidths& bw, TruncationConfig& trunc, Rng& rng,
    int max_model_kernels = 0);

/// Position frames: u = h = v^-1 o B^O, weighted by descriptor distance from
/// the cloud mean (uniform fallback when all descriptors coincide).
PositionModel train_position_model(const std::vector<SurfaceFeature>& features,
                                   const Posed& object_pose, const Bandwidths& bw,
                                   const std::string& shape_id);

}  // namespace pushcast
