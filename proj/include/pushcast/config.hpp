#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pushcast/density.hpp"
#include "pushcast/query.hpp"
#include "pushcast/shapes.hpp"
#include "pushcast/sim.hpp"

namespace pushcast {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every knob of the pipeline with defaults matching the published parameter
/// tables where available. Unknown keys in a config file are rejected with
/// the offending dotted path.
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;

  // cloud capture
  double cloud_density = 10000.0;  // points per m^2
  double neighborhood_radius = 0.025;
  Eigen::Vector3d viewpoint{1.2, 0.9, 0.5};

  Bandwidths bandwidths;
  TruncationConfig truncation;

  // manipulator contact model
  double contact_delta = 0.01;
  double contact_lambda = 100.0;

  // environment contacts
  int env_train_contacts = 10;
  int env_predict_contacts = 5;
  int env_predict_samples = 100;
  int env_model_max_kernels = 2000;

  // actions
  int n_actions = 3;
  double angle_min_deg = -10.0;
  double angle_max_deg = 10.0;
  double action_duration = 4.0;
  double action_speed = 0.1;

  // motion model training
  int samples_per_action = 500;
  ParameterDistributions params;

  // query densities
  int pose_kernels = 3000;
  int contact_kernels = 500;
  WeightingMode weighting_mode = WeightingMode::Similarity;
  AnnealConfig pose_anneal;    // 500 candidates, 100 steps
  AnnealConfig motion_anneal;  // same defaults

  // prediction
  int predict_env_kernels = 5000;
  int predict_manip_kernels = 500;

  SimParams sim;
  BumperSpec bumper;

  // experiments
  std::string experiment = "selection";  // selection | pose | biasing-friction | biasing-mass
  int n_conditions = 50;                 // selection trials per object
  int pose_runs = 100;                   // pose-estimation repetitions per object
  int biasing_conditions = 100;          // pushes per biasing cell
  double scene_offset = 0.1;             // test pose translation range, metres

  std::vector<ShapeSpec> train_objects{ShapeSpec::cube(0.2), ShapeSpec::cylinder(0.2, 0.1)};
  std::string output_dir = "out";
};

RunConfig default_config();

/// Parses a JSON document over the defaults. Throws ConfigError naming the
/// dotted path of any unknown key or ill-typed value.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const RunConfig& config);

/// FNV-1a over the canonical JSON dump with the seed field cleared; artifacts
/// produced under different configurations refuse to mix.
std::string config_hash(const RunConfig& config);

nlohmann::json distribution_to_json(const ParameterDistribution& dist);
ParameterDistribution distribution_from_json(const nlohmann::json& node, const std::string& path);

nlohmann::json shape_spec_to_json(const ShapeSpec& spec);
ShapeSpec shape_spec_from_json(const nlohmann::json& node, const std::string& path);

}  // namespace pushcast
