#include "pushcast/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "pushcast/io.hpp"

namespace pushcast {

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

PointCloud training_capture(const SimWorld& world, double density, std::uint64_t seed) {
  TriMesh world_mesh = world.object_mesh;
  for (auto& v : world_mesh.vertices) v = world.object_rest_pose.apply(v);
  const PointCloud full = sample_full_cloud(world_mesh, density, seed);
  PointCloud cloud;
  cloud.source_pose = world.object_rest_pose;
  for (std::size_t i = 0; i < full.points.size(); ++i) {
    if (full.normals[i].z() < -0.9 && full.points[i].z() < 0.01) continue;
    cloud.points.push_back(full.points[i]);
    cloud.normals.push_back(full.normals[i]);
  }
  return cloud;
}

LibraryEntry train_entry(const ShapeSpec& spec, const RunConfig& config, Rng& rng,
                         int* skipped_pushes) {
  const SimWorld world = make_world(spec, config.bumper, config.sim);

  // Stage one: full-coverage cloud of the object at rest.
  Rng cloud_rng = rng.fork(0x636c6f7564ull);
  PointCloud cloud = training_capture(world, config.cloud_density, cloud_rng.next_u64());
  const std::vector<SurfaceFeature> features =
      extract_features(cloud, {config.neighborhood_radius});
  log_debug("train_entry " + spec.label() + ": " + std::to_string(features.size()) +
            " surface features");

  LibraryEntry entry;
  entry.shape_id = spec.label();
  entry.spec = spec;
  entry.manipulator = train_manipulator_contact_model(
      features, world.bumper_mesh, world.training_link_pose, world.object_rest_pose,
      config.contact_delta, config.contact_lambda, entry.shape_id, "bumper");
  entry.position =
      train_position_model(features, world.object_rest_pose, config.bandwidths, entry.shape_id);

  const std::vector<Action> actions =
      make_actions(config.n_actions, config.angle_min_deg, config.angle_max_deg,
                   config.action_duration, config.action_speed);
  Rng stage2 = rng.fork(0x737461676532ull);
  MotionTrainResult trained = train_motion_model(
      entry.manipulator, features, world, actions, config.samples_per_action, config.params,
      config.env_train_contacts, config.bandwidths, config.sim, stage2);
  entry.motion = std::move(trained.motion);
  entry.environment = std::move(trained.environment);
  if (skipped_pushes) *skipped_pushes += trained.skipped_pushes;
  if (trained.skipped_pushes > 0)
    log_info("train_entry " + spec.label() + ": skipped " +
             std::to_string(trained.skipped_pushes) + " pushes");
  return entry;
}

ModelLibrary train_library(const RunConfig& config) {
  ModelLibrary library;
  library.seed = config.seed;
  library.config_hash = config_hash(config);
  Rng rng(config.seed);
  int skipped = 0;
  for (std::size_t i = 0; i < config.train_objects.size(); ++i) {
    Rng entry_rng = rng.fork(i);
    library.entries.push_back(
        train_entry(config.train_objects[i], config, entry_rng, &skipped));
  }
  return library;
}

PushCondition generate_condition(const ShapeSpec& spec, const RunConfig& config, Rng& rng,
                                 int action_id, double yaw_range) {
  const TriMesh mesh = make_mesh(spec);
  PushCondition condition;
  condition.spec = spec;
  condition.action_id = action_id;
  const double yaw = rng.uniform(-yaw_range, yaw_range);
  condition.true_pose = Posed(
      Eigen::Vector3d(rng.uniform(-config.scene_offset, config.scene_offset),
                      rng.uniform(-config.scene_offset, config.scene_offset),
                      mesh.dims.z() / 2),
      Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())));
  condition.partial_cloud = sample_partial_cloud(mesh, condition.true_pose, config.viewpoint,
                                                 config.cloud_density, rng.next_u64());
  condition.features = extract_features(condition.partial_cloud, {config.neighborhood_radius});
  return condition;
}

namespace {

double yaw_of(const Eigen::Quaterniond& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

// The robot base stays on the floor: keep the placement's yaw, drop any tilt
// inherited from noisy feature frames, and pin the bumper height.
Posed planarize_pusher(const Posed& pose, const BumperSpec& bumper) {
  return Posed(Eigen::Vector3d(pose.p.x(), pose.p.y(), bumper.height / 2),
               Eigen::Quaterniond(
                   Eigen::AngleAxisd(yaw_of(pose.q), Eigen::Vector3d::UnitZ())));
}

}  // namespace

PreparedPush prepare_push(const PushCondition& condition, const ModelLibrary& library,
                          int entry_index, const RunConfig& config, Rng& rng) {
  PreparedPush out;

  if (entry_index < 0) {
    Rng select_rng = rng.fork(0x73656c6563ull);
    const ModelSelection selection =
        select_model(library, condition.features, config.contact_kernels,
                     config.weighting_mode, config.bandwidths, select_rng);
    out.entry_index = selection.entry_index;
  } else {
    out.entry_index = entry_index;
  }
  const LibraryEntry& entry = library.entries[out.entry_index];

  // Placement candidates: the bumper can only engage near-vertical surfaces,
  // so features whose normals point mostly up or down are not usable here.
  std::vector<SurfaceFeature> side_features;
  for (const auto& f : condition.features) {
    if (std::abs(f.v.q.toRotationMatrix().col(2).z()) <= 0.5) side_features.push_back(f);
  }
  const std::vector<SurfaceFeature>& placement_features =
      side_features.empty() ? condition.features : side_features;

  // The working density is rebuilt on a stream independent of how the entry
  // was chosen, so an adaptive selection that lands on the matched entry
  // reproduces the hand-picked pipeline exactly.
  Rng qd_rng = rng.fork(0x6d616e6970ull);
  QueryDensity manip_qd =
      build_query_density(entry.manipulator.frames, placement_features, config.contact_kernels,
                          config.weighting_mode, config.bandwidths, qd_rng, entry.shape_id);
  out.selection_h_r = manip_qd.h_r;

  AnnealConfig placement_anneal = config.pose_anneal;
  placement_anneal.trans_std = std::sqrt(config.bandwidths.sigma_p);
  placement_anneal.jobs = 1;

  Rng placement_rng = rng.fork(0x706c616365ull);
  const PoseEstimate placement = estimate_pose(manip_qd, placement_anneal, config.truncation,
                                               placement_rng);
  out.robot_placement = placement.pose;
  out.rounds_used = placement.rounds_used;

  const QueryKernel& picked = select_manipulator_frame(manip_qd, placement.pose);
  out.manipulator_frame = picked.frame;
  // Bumper pose whose recorded link-local contact point lands on the kernel.
  const Posed link = compose(
      picked.pose, Posed(-picked.frame.link_point, Eigen::Quaterniond::Identity()));
  out.pusher_start = planarize_pusher(link, config.bumper);

  Rng env_rng = rng.fork(0x656e76706cull);
  TruncationConfig env_trunc = config.truncation;
  out.environment_frames = place_environment_contacts(
      condition.features, entry.environment, config.env_predict_contacts,
      config.env_predict_samples, config.bandwidths, env_trunc, env_rng,
      config.env_model_max_kernels);
  out.rounds_used = std::max(out.rounds_used, env_trunc.rounds() - config.truncation.rounds());

  Rng pose_rng = rng.fork(0x706f7365ull);
  QueryDensity pose_qd =
      build_query_density(entry.position.frames, condition.features, config.pose_kernels,
                          config.weighting_mode, config.bandwidths, pose_rng,
                          entry.shape_id);
  out.pose_estimate = estimate_pose(pose_qd, placement_anneal, config.truncation, pose_rng);
  out.rounds_used = std::max(out.rounds_used, out.pose_estimate.rounds_used);

  // Slide the bumper along its lateral axis until its centreline passes
  // through the estimated object position: training pushes are centred, so
  // the starting placement reproduces that geometry.
  {
    const double pyaw = yaw_of(out.pusher_start.q);
    const Eigen::Vector2d lateral(-std::sin(pyaw), std::cos(pyaw));
    const Eigen::Vector2d to_center =
        out.pose_estimate.pose.p.head<2>() - out.pusher_start.p.head<2>();
    out.pusher_start.p.x() += to_center.dot(lateral) * lateral.x();
    out.pusher_start.p.y() += to_center.dot(lateral) * lateral.y();
  }

  // Frame relations to the estimated origin.
  out.manipulator_frame.h = compose(inverse(out.manipulator_frame.v), out.pose_estimate.pose);
  for (auto& f : out.environment_frames)
    f.h = compose(inverse(f.v), out.pose_estimate.pose);
  return out;
}

PushOutcome execute_push(const PushCondition& condition, const PreparedPush& prepared,
                         const ModelLibrary& library, const ParameterDistributions& test_dists,
                         const RunConfig& config, Rng& rng) {
  const LibraryEntry& entry = library.entries[prepared.entry_index];

  std::vector<ContactFrame> frames;
  frames.push_back(prepared.manipulator_frame);
  frames.insert(frames.end(), prepared.environment_frames.begin(),
                prepared.environment_frames.end());

  PredictConfig predict_config;
  predict_config.env_kernels = config.predict_env_kernels;
  predict_config.manip_kernels = config.predict_manip_kernels;
  predict_config.anneal = config.motion_anneal;
  predict_config.anneal.trans_std = std::sqrt(config.bandwidths.sigma_pm);
  predict_config.anneal.jobs = 1;

  PushOutcome outcome;
  Rng predict_rng = rng.fork(0x7072656469ull);
  outcome.prediction =
      predict(entry.motion, condition.action_id, frames, prepared.pose_estimate.pose,
              predict_config, config.bandwidths, config.truncation, predict_rng);

  // Ground truth: simulate the same placement under parameters drawn from the
  // test distributions, backing the bumper off any initial overlap.
  const SimWorld world = make_world(condition.spec, config.bumper, config.sim);
  Rng gt_rng = rng.fork(0x67740000ull);
  outcome.ground_truth_params = sample_params(test_dists, gt_rng);

  Posed pusher = prepared.pusher_start;
  {
    const double pyaw = yaw_of(pusher.q);
    const Eigen::Vector2d heading(std::cos(pyaw), std::sin(pyaw));
    const Eigen::Vector2d lateral(-heading.y(), heading.x());
    const Eigen::Vector2d face =
        pusher.p.head<2>() + (config.bumper.depth / 2) * heading;
    const double oyaw = yaw_of(condition.true_pose.q);
    double pen = 0;
    for (const auto& fv : world.footprint) {
      const Eigen::Vector2d v =
          condition.true_pose.p.head<2>() +
          Eigen::Vector2d(std::cos(oyaw) * fv.x() - std::sin(oyaw) * fv.y(),
                          std::sin(oyaw) * fv.x() + std::cos(oyaw) * fv.y());
      const double sn = (v - face).dot(heading);
      if (std::abs((v - face).dot(lateral)) <= config.bumper.width / 2)
        pen = std::max(pen, -sn);
    }
    if (pen > 0) {
      pusher.p.x() -= (pen + 1e-4) * heading.x();
      pusher.p.y() -= (pen + 1e-4) * heading.y();
    }
  }

  const std::vector<Action> actions =
      make_actions(config.n_actions, config.angle_min_deg, config.angle_max_deg,
                   config.action_duration, config.action_speed);
  const PushEpisode episode =
      simulate_push(world, condition.true_pose, outcome.ground_truth_params, pusher,
                    actions[condition.action_id], config.sim, gt_rng);
  outcome.ground_truth_final = episode.final_pose;
  outcome.ground_truth_valid = !episode.tipped;
  return outcome;
}

}  // namespace pushcast
