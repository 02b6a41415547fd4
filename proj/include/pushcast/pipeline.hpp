#pragma once

#include <string>
#include <vector>

#include "pushcast/config.hpp"
#include "pushcast/eval.hpp"
#include "pushcast/query.hpp"

namespace pushcast {

/// Maximal-coverage training capture of the object at rest. Multi-view
/// acquisition cannot see the resting face, so bottom-facing samples on the
/// floor are dropped.
PointCloud training_capture(const SimWorld& world, double density, std::uint64_t seed);

/// Trains the full model stack for one object: full-cloud capture, feature
/// extraction, manipulator and position models, then the push-sampling stage
/// that yields the motion and environment models.
LibraryEntry train_entry(const ShapeSpec& spec, const RunConfig& config, Rng& rng,
                         int* skipped_pushes = nullptr);

ModelLibrary train_library(const RunConfig& config);

/// A prediction-time scene: a novel object at a hidden pose, observed once.
struct PushCondition {
  ShapeSpec spec;
  Posed true_pose;                       // simulator ground truth, hidden from models
  PointCloud partial_cloud;
  std::vector<SurfaceFeature> features;
  int action_id = 0;
};

/// yaw_range limits the drawn orientation to [-yaw_range, yaw_range]; the
/// pose-estimation study uses it to keep asymmetric features in view.
PushCondition generate_condition(const ShapeSpec& spec, const RunConfig& config, Rng& rng,
                                 int action_id = 0, double yaw_range = 3.14159265358979);

/// Everything the motion model needs from the condition-generation stage.
struct PreparedPush {
  int entry_index = -1;
  double selection_h_r = 0.0;
  Posed robot_placement;           // annealed manipulator-density mode
  Posed pusher_start;              // reconstructed bumper pose for simulation
  ContactFrame manipulator_frame;
  std::vector<ContactFrame> environment_frames;
  PoseEstimate pose_estimate;
  int rounds_used = 0;
};

/// Applies one library entry to a condition: robot placement, environment
/// contacts, pose estimate. entry_index < 0 selects by the heuristic.
PreparedPush prepare_push(const PushCondition& condition, const ModelLibrary& library,
                          int entry_index, const RunConfig& config, Rng& rng);

struct PushOutcome {
  Prediction prediction;
  Posed ground_truth_final;
  PhysicalParams ground_truth_params;
  bool ground_truth_valid = true;
};

/// Predicts with the prepared frames and simulates the same placement under
/// parameters drawn from test_dists.
PushOutcome execute_push(const PushCondition& condition, const PreparedPush& prepared,
                         const ModelLibrary& library, const ParameterDistributions& test_dists,
                         const RunConfig& config, Rng& rng);

/// Deterministic parallel map over [0, n): results are ordered by index and
/// identical for any job count.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

}  // namespace pushcast
