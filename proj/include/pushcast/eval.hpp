#pragma once

#include <map>
#include <string>
#include <vector>

#include "pushcast/geometry.hpp"
#include "pushcast/shapes.hpp"

namespace pushcast {

struct RunConfig;  // config.hpp
class Rng;

/// Orientations under which a shape appears identical. Discrete rotations
/// always include the identity; cylinders add a free yaw (handled in closed
/// form) and the 180-degree flip family.
struct SymmetrySet {
  std::vector<Eigen::Quaterniond> rotations{Eigen::Quaterniond::Identity()};
  bool continuous_z = false;
  bool z_flip = false;
};

SymmetrySet symmetry_set(const ShapeSpec& spec);

/// Size-normalized pose error: ||(p_e - p_gt)^T D_S|| plus the minimum of
/// 1 - <q_e, q_gt*s>^2 over the symmetry set.
double accuracy(const Posed& predicted, const Posed& ground_truth, const Eigen::Vector3d& dims,
                const SymmetrySet& symmetry);

/// Symmetry-aware geodesic rotation error, radians.
double rotation_error(const Eigen::Quaterniond& predicted, const Eigen::Quaterniond& ground_truth,
                      const SymmetrySet& symmetry);

/// Translation = cloud mean, rotation = identity.
Posed centroid_baseline(const PointCloud& cloud);

struct AccuracyRow {
  std::string condition;
  std::string object;
  int push_id = 0;
  double h_acc = 0.0;
  double linear_error_m = 0.0;
  double angular_error_rad = 0.0;
};

struct CellStats {
  std::string condition;
  std::string object;
  int count = 0;
  double mean_h_acc = 0.0;
  double std_h_acc = 0.0;
  double mean_linear_error = 0.0;
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;
  std::map<std::string, double> metrics;  // named scalars (hit rates, training stats)
  int skipped = 0;

  void add(AccuracyRow row) { rows.push_back(std::move(row)); }
  std::vector<CellStats> cells() const;  // grouped by (condition, object)
  CellStats cell(const std::string& condition, const std::string& object = {}) const;
};

AccuracyReport run_selection_experiment(const RunConfig& config, Rng& rng);
AccuracyReport run_pose_experiment(const RunConfig& config, Rng& rng);

enum class BiasFamily { Friction, Mass };
AccuracyReport run_biasing_experiment(const RunConfig& config, BiasFamily family, Rng& rng);

}  // namespace pushcast
