#pragma once

#include <optional>
#include <vector>

#include "pushcast/contact.hpp"
#include "pushcast/density.hpp"
#include "pushcast/sim.hpp"

namespace pushcast {

/// One training push: the sampled physical parameters, the contact frames at
/// t0 (manipulator first, then environment), their local motions over
/// [t0, tF] in each frame's own t0 coordinates, and the body-frame global
/// motion B(t0)^-1 o B(tF).
struct PushDataRecord {
  int action_id = 0;
  PhysicalParams params;
  std::vector<ContactFrame> frames;
  std::vector<Posed> local_motions;
  Posed global_motion;
};

struct MotionModel {
  std::vector<Action> actions;
  std::vector<PushDataRecord> records;
  Bandwidths sigma;
};

/// Derives the PDR from a finished episode: local motion of frame i is
/// v_i^-1 o Delta_W o v_i with Delta_W the world motion of the object.
PushDataRecord record_push(const PushEpisode& episode, const std::vector<ContactFrame>& frames,
                           int action_id, const PhysicalParams& params);

struct MotionTrainResult {
  MotionModel motion;
  EnvironmentContactModel environment;
  int skipped_pushes = 0;
};

/// Stage-two training: per action, samples_per_action pushes with parameters
/// drawn from dists, the manipulator frame drawn from the contact model and
/// environment frames placed by the training-time sampler. Rejected episodes
/// (tipping, no contact) are skipped and counted.
MotionTrainResult train_motion_model(const ManipulatorContactModel& contact_model,
                                     const std::vector<SurfaceFeature>& features,
                                     const SimWorld& world, const std::vector<Action>& actions,
                                     int samples_per_action, const ParameterDistributions& dists,
                                     int env_contacts_per_push, const Bandwidths& bw,
                                     const SimParams& sim, Rng& rng);

struct PredictConfig {
  int env_kernels = 5000;
  int manip_kernels = 500;
  AnnealConfig anneal;
};

struct Prediction {
  Posed final_pose;
  Posed global_motion;  // body-frame
  double log_likelihood = 0.0;
  bool failed = false;
  int rounds_used = 0;
};

/// Product-of-experts prediction: one motion KDE per placed frame, kernels
/// drawn from the action's PDRs and weighted by contact similarity, shifted
/// into the shared body-motion space through each frame's relation to the
/// estimated pose. The manipulator expert's density enters with exponent
/// n_env_kernels / n_manip_kernels.
Prediction predict(const MotionModel& model, int action_id,
                   const std::vector<ContactFrame>& placed_frames,
                   const Posed& initial_pose_estimate, const PredictConfig& config,
                   const Bandwidths& bw, const TruncationConfig& trunc0, Rng& rng);

}  // namespace pushcast
