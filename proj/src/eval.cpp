#include "pushcast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "pushcast/config.hpp"
#include "pushcast/io.hpp"
#include "pushcast/pipeline.hpp"

namespace pushcast {

namespace {

Eigen::Quaterniond axis_rotation(const Eigen::Vector3d& axis, double angle) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized()));
}

std::vector<Eigen::Quaterniond> cube_rotations() {
  // The 24 proper rotations of the cube: signed axis permutations with
  // determinant +1.
  std::vector<Eigen::Quaterniond> out;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : perms) {
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        for (int sz = -1; sz <= 1; sz += 2) {
          Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
          m(0, perm[0]) = sx;
          m(1, perm[1]) = sy;
          m(2, perm[2]) = sz;
          if (m.determinant() > 0.5) out.emplace_back(m);
        }
      }
    }
  }
  return out;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

SymmetrySet symmetry_set(const ShapeSpec& spec) {
  SymmetrySet set;
  const auto& d = spec.dimensions;
  const auto eq = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  switch (spec.kind) {
    case ShapeKind::Cube:
      set.rotations = cube_rotations();
      return set;
    case ShapeKind::Box: {
      if (eq(d.x(), d.y()) && eq(d.x(), d.z())) {
        set.rotations = cube_rotations();
        return set;
      }
      int four_axis = -1;  // axis of the square cross-section, if any
      if (eq(d.x(), d.y())) four_axis = 2;
      else if (eq(d.x(), d.z())) four_axis = 1;
      else if (eq(d.y(), d.z())) four_axis = 0;
      if (four_axis < 0) {
        set.rotations = {Eigen::Quaterniond::Identity(),
                         axis_rotation(Eigen::Vector3d::UnitX(), kPi),
                         axis_rotation(Eigen::Vector3d::UnitY(), kPi),
                         axis_rotation(Eigen::Vector3d::UnitZ(), kPi)};
        return set;
      }
      Eigen::Vector3d main = Eigen::Vector3d::Zero();
      main(four_axis) = 1;
      Eigen::Vector3d flip = Eigen::Vector3d::Zero();
      flip((four_axis + 1) % 3) = 1;
      set.rotations.clear();
      for (int k = 0; k < 4; ++k) {
        const Eigen::Quaterniond r = axis_rotation(main, k * kPi / 2);
        set.rotations.push_back(r);
        set.rotations.push_back(r * axis_rotation(flip, kPi));
      }
      return set;
    }
    case ShapeKind::Cylinder:
      set.continuous_z = true;
      set.z_flip = true;
      return set;
    case ShapeKind::Hybrid:
      // The cross-section's mirror combined with the top-bottom flip is the
      // one proper rotation: 180 degrees about the x axis.
      set.rotations = {Eigen::Quaterniond::Identity(),
                       axis_rotation(Eigen::Vector3d::UnitX(), kPi)};
      return set;
    case ShapeKind::NotchedCube:
      // Threefold rotation about the notched corner's body diagonal.
      set.rotations = {Eigen::Quaterniond::Identity(),
                       axis_rotation(Eigen::Vector3d::Ones(), 2 * kPi / 3),
                       axis_rotation(Eigen::Vector3d::Ones(), -2 * kPi / 3)};
      return set;
  }
  throw std::invalid_argument("symmetry_set: unknown shape kind");
}

namespace {

// max over yaw of <q_e, base * rotZ(yaw)>^2, optionally also over the flip
// family base * rotX(pi) * rotZ(yaw); solved in closed form.
double best_dot_sq(const Eigen::Quaterniond& q_e, const Eigen::Quaterniond& base,
                   bool continuous, bool flip) {
  if (!continuous) {
    const double dot = q_e.coeffs().dot(base.coeffs());
    return dot * dot;
  }
  const Eigen::Quaterniond zhat(0, 0, 0, 1);
  const double alpha = q_e.coeffs().dot(base.coeffs());
  const double beta = q_e.coeffs().dot((base * zhat).coeffs());
  double best = alpha * alpha + beta * beta;
  if (flip) {
    const Eigen::Quaterniond xhat(0, 1, 0, 0);
    const Eigen::Quaterniond flipped = base * xhat;
    const double gamma = q_e.coeffs().dot(flipped.coeffs());
    const double delta = q_e.coeffs().dot((flipped * zhat).coeffs());
    best = std::max(best, gamma * gamma + delta * delta);
  }
  return best;
}

double best_symmetry_dot_sq(const Eigen::Quaterniond& predicted,
                            const Eigen::Quaterniond& ground_truth, const SymmetrySet& sym) {
  double best = 0;
  for (const auto& s : sym.rotations)
    best = std::max(best, best_dot_sq(predicted, ground_truth * s, sym.continuous_z, sym.z_flip));
  return std::min(best, 1.0);
}

}  // namespace

double accuracy(const Posed& predicted, const Posed& ground_truth, const Eigen::Vector3d& dims,
                const SymmetrySet& symmetry) {
  if (!(dims.minCoeff() > 0)) throw std::invalid_argument("accuracy: dims must be positive");
  const Eigen::Vector3d scaled = (predicted.p - ground_truth.p).cwiseQuotient(dims);
  return scaled.norm() + (1.0 - best_symmetry_dot_sq(predicted.q, ground_truth.q, symmetry));
}

double rotation_error(const Eigen::Quaterniond& predicted, const Eigen::Quaterniond& ground_truth,
                      const SymmetrySet& symmetry) {
  const double dot = std::sqrt(best_symmetry_dot_sq(predicted, ground_truth, symmetry));
  return 2.0 * std::acos(std::min(1.0, dot));
}

Posed centroid_baseline(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("centroid_baseline: empty cloud");
  return Posed(cloud.centroid(), Eigen::Quaterniond::Identity());
}

std::vector<CellStats> AccuracyReport::cells() const {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::map<std::pair<std::string, std::string>, double> linear;
  for (const auto& row : rows) {
    groups[{row.condition, row.object}].push_back(row.h_acc);
    linear[{row.condition, row.object}] += row.linear_error_m;
  }
  std::vector<CellStats> out;
  for (const auto& [key, values] : groups) {
    CellStats cell;
    cell.condition = key.first;
    cell.object = key.second;
    cell.count = static_cast<int>(values.size());
    double mean = 0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    cell.mean_h_acc = mean;
    cell.std_h_acc = values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
    cell.mean_linear_error = linear[key] / values.size();
    out.push_back(std::move(cell));
  }
  return out;
}

CellStats AccuracyReport::cell(const std::string& condition, const std::string& object) const {
  std::vector<double> h, lin;
  for (const auto& row : rows) {
    if (row.condition != condition) continue;
    if (!object.empty() && row.object != object) continue;
    h.push_back(row.h_acc);
    lin.push_back(row.linear_error_m);
  }
  CellStats cell;
  cell.condition = condition;
  cell.object = object;
  cell.count = static_cast<int>(h.size());
  if (h.empty()) return cell;
  double mean = 0, mean_lin = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    mean += h[i];
    mean_lin += lin[i];
  }
  mean /= h.size();
  mean_lin /= lin.size();
  double var = 0;
  for (double v : h) var += (v - mean) * (v - mean);
  cell.mean_h_acc = mean;
  cell.std_h_acc = h.size() > 1 ? std::sqrt(var / (h.size() - 1)) : 0.0;
  cell.mean_linear_error = mean_lin;
  return cell;
}

namespace {

AccuracyRow make_row(const std::string& condition, const std::string& object, int push_id,
                     const Posed& predicted, const Posed& truth, const Eigen::Vector3d& dims,
                     const SymmetrySet& sym) {
  AccuracyRow row;
  row.condition = condition;
  row.object = object;
  row.push_id = push_id;
  row.h_acc = accuracy(predicted, truth, dims, sym);
  row.linear_error_m = (predicted.p - truth.p).norm();
  row.angular_error_rad = rotation_error(predicted.q, truth.q, sym);
  return row;
}

}  // namespace

AccuracyReport run_selection_experiment(const RunConfig& base_config, Rng& rng) {
  RunConfig config = base_config;
  // Test-set parameters for the selection study: fixed mass, a narrow
  // object/ground friction band.
  config.params.mass = ParameterDistribution::dirac(0.5);
  config.params.ground_friction = ParameterDistribution::uniform(0.15, 0.35);
  config.train_objects = {ShapeSpec::cube(0.2), ShapeSpec::cylinder(0.2, 0.1)};

  log_info("selection experiment: training library");
  const ModelLibrary library = train_library(config);

  struct Cell {
    std::vector<AccuracyRow> rows;
    int hits = 0;
    int adaptive_trials = 0;
    int skipped = 0;
  };
  const int n_objects = static_cast<int>(config.train_objects.size());
  const int total = n_objects * config.n_conditions;
  std::vector<Cell> cells(total);

  Rng master = rng.fork(0x73656c6578ull);
  parallel_for(total, config.jobs, [&](int idx) {
    const int obj_i = idx / config.n_conditions;
    const int cond_i = idx % config.n_conditions;
    const ShapeSpec& spec = config.train_objects[obj_i];
    const SymmetrySet sym = symmetry_set(spec);
    Rng cell_rng = master.fork(idx);

    PushCondition condition;
    try {
      condition = generate_condition(spec, config, cell_rng, cond_i % config.n_actions);
    } catch (const std::exception&) {
      cells[idx].skipped = 3;
      return;
    }

    const struct {
      const char* name;
      int entry;
    } modes[3] = {{"congruent", obj_i}, {"incongruent", 1 - obj_i}, {"adaptive", -1}};
    for (int mi = 0; mi < 3; ++mi) {
      const auto& mode = modes[mi];
      try {
        // A mode-independent stream: when the adaptive mode selects the
        // matched entry its rows coincide with the congruent ones.
        Rng mode_rng = cell_rng.fork(100);
        PreparedPush prepared = prepare_push(condition, library, mode.entry, config, mode_rng);
        if (mode.entry < 0) {
          ++cells[idx].adaptive_trials;
          if (prepared.entry_index == obj_i) ++cells[idx].hits;
        }
        PushOutcome outcome =
            execute_push(condition, prepared, library, config.params, config, mode_rng);
        if (outcome.prediction.failed || !outcome.ground_truth_valid) {
          ++cells[idx].skipped;
          continue;
        }
        cells[idx].rows.push_back(make_row(mode.name, spec.label(), idx,
                                           outcome.prediction.final_pose,
                                           outcome.ground_truth_final, spec.dimensions, sym));
      } catch (const std::exception& e) {
        log_error(std::string("selection cell failed: ") + e.what());
        ++cells[idx].skipped;
      }
    }
  });

  AccuracyReport report;
  int hits = 0, trials = 0;
  std::map<std::string, std::pair<int, int>> per_object;  // hits, trials
  for (int idx = 0; idx < total; ++idx) {
    for (auto& row : cells[idx].rows) report.add(std::move(row));
    report.skipped += cells[idx].skipped;
    hits += cells[idx].hits;
    trials += cells[idx].adaptive_trials;
    const std::string label = config.train_objects[idx / config.n_conditions].label();
    per_object[label].first += cells[idx].hits;
    per_object[label].second += cells[idx].adaptive_trials;
  }
  report.metrics["adaptive_hit_rate"] =
      trials > 0 ? static_cast<double>(hits) / trials : 0.0;
  for (const auto& [label, counts] : per_object)
    report.metrics["adaptive_hit_rate:" + label] =
        counts.second > 0 ? static_cast<double>(counts.first) / counts.second : 0.0;
  return report;
}

AccuracyReport run_pose_experiment(const RunConfig& config, Rng& rng) {
  const std::vector<ShapeSpec> objects = {ShapeSpec::cube(0.2), ShapeSpec::cylinder(0.2, 0.1),
                                          ShapeSpec::notched_cube(0.2)};
  AccuracyReport report;
  Rng master = rng.fork(0x706f736578ull);

  for (std::size_t oi = 0; oi < objects.size(); ++oi) {
    const ShapeSpec& spec = objects[oi];
    const SymmetrySet sym = symmetry_set(spec);
    Rng obj_rng = master.fork(oi);

    // Stage one on the training capture at rest.
    const SimWorld world = make_world(spec, config.bumper, config.sim);
    const PointCloud full = training_capture(world, config.cloud_density, obj_rng.next_u64());
    const auto full_features = extract_features(full, {config.neighborhood_radius});
    const PositionModel position =
        train_position_model(full_features, world.object_rest_pose, config.bandwidths,
                             spec.label());

    // One observed scene per object, oriented so the camera can see the
    // asymmetry that disambiguates the orientation (the notch in particular).
    const PushCondition condition = generate_condition(spec, config, obj_rng, 0, kPi / 3);
    const Posed centroid = centroid_baseline(condition.partial_cloud);
    report.add(make_row("centroid", spec.label(), 0, centroid, condition.true_pose,
                        spec.dimensions, sym));

    AnnealConfig anneal_cfg = config.pose_anneal;
    anneal_cfg.trans_std = std::sqrt(config.bandwidths.sigma_p);
    anneal_cfg.jobs = 1;

    std::vector<AccuracyRow> rows(config.pose_runs);
    std::vector<char> ok(config.pose_runs, 0);
    parallel_for(config.pose_runs, config.jobs, [&](int run) {
      try {
        Rng run_rng = obj_rng.fork(1000 + run);
        QueryDensity qd = build_query_density(position.frames, condition.features,
                                              config.pose_kernels, config.weighting_mode,
                                              config.bandwidths, run_rng, spec.label());
        const PoseEstimate estimate =
            estimate_pose(qd, anneal_cfg, config.truncation, run_rng);
        rows[run] = make_row("position", spec.label(), run, estimate.pose,
                             condition.true_pose, spec.dimensions, sym);
        ok[run] = 1;
      } catch (const std::exception& e) {
        log_error(std::string("pose run failed: ") + e.what());
      }
    });
    for (int run = 0; run < config.pose_runs; ++run) {
      if (ok[run])
        report.add(std::move(rows[run]));
      else
        ++report.skipped;
    }
  }
  return report;
}

AccuracyReport run_biasing_experiment(const RunConfig& base_config, BiasFamily family, Rng& rng) {
  RunConfig config = base_config;
  const std::string family_name = family == BiasFamily::Friction ? "friction" : "mass";
  const std::vector<std::string> bias_names = {"general", "low", "medium", "high"};
  const std::vector<std::string> test_names = {"low", "medium", "high"};

  auto dists_for = [&](const std::string& bias) {
    ParameterDistributions d;
    if (family == BiasFamily::Friction) {
      d.mass = ParameterDistribution::gaussian(0.5, 0.025);
      d.ground_friction = bias == "general"
                              ? ParameterDistribution::preset("friction_general")
                              : ParameterDistribution::preset("friction_" + bias);
    } else {
      d.ground_friction = ParameterDistribution::preset("ground_friction_default");
      d.mass = bias == "general" ? ParameterDistribution::preset("mass_general_table")
                                 : ParameterDistribution::preset("mass_" + bias);
    }
    d.pusher_friction = base_config.params.pusher_friction;
    return d;
  };

  const std::vector<ShapeSpec> objects = {ShapeSpec::cube(0.2), ShapeSpec::cylinder(0.2, 0.1)};

  // Stage one is shape-only and shared across the bias levels; stage two is
  // retrained per level. Each bias level becomes its own library with one
  // entry per object.
  AccuracyReport report;
  std::vector<ModelLibrary> libraries(bias_names.size());
  Rng master = rng.fork(family == BiasFamily::Friction ? 0x66726963ull : 0x6d617373ull);

  for (std::size_t oi = 0; oi < objects.size(); ++oi) {
    const ShapeSpec& spec = objects[oi];
    Rng obj_rng = master.fork(oi);
    const SimWorld world = make_world(spec, config.bumper, config.sim);
    Rng cloud_rng = obj_rng.fork(0x636cull);
    const PointCloud full = training_capture(world, config.cloud_density, cloud_rng.next_u64());
    const auto features = extract_features(full, {config.neighborhood_radius});
    const ManipulatorContactModel manip = train_manipulator_contact_model(
        features, world.bumper_mesh, world.training_link_pose, world.object_rest_pose,
        config.contact_delta, config.contact_lambda, spec.label(), "bumper");
    const PositionModel position =
        train_position_model(features, world.object_rest_pose, config.bandwidths, spec.label());
    const std::vector<Action> actions =
        make_actions(config.n_actions, config.angle_min_deg, config.angle_max_deg,
                     config.action_duration, config.action_speed);

    for (std::size_t bi = 0; bi < bias_names.size(); ++bi) {
      Rng stage2 = obj_rng.fork(100 + bi);
      MotionTrainResult trained = train_motion_model(
          manip, features, world, actions, config.samples_per_action, dists_for(bias_names[bi]),
          config.env_train_contacts, config.bandwidths, config.sim, stage2);
      LibraryEntry entry;
      entry.shape_id = spec.label();
      entry.spec = spec;
      entry.manipulator = manip;
      entry.position = position;
      entry.motion = std::move(trained.motion);
      entry.environment = std::move(trained.environment);
      report.skipped += trained.skipped_pushes;

      double displacement = 0;
      for (const auto& rec : entry.motion.records) displacement += rec.global_motion.p.norm();
      if (!entry.motion.records.empty())
        report.metrics["train_displacement:" + family_name + ":" + bias_names[bi] + ":" +
                       spec.label()] = displacement / entry.motion.records.size();
      libraries[bi].entries.push_back(std::move(entry));
    }
  }
  log_info("biasing experiment (" + family_name + "): models trained");

  struct ConditionResult {
    std::vector<AccuracyRow> rows;
    int skipped = 0;
  };
  const int n_objects = static_cast<int>(objects.size());
  const int total = n_objects * config.biasing_conditions;
  std::vector<ConditionResult> results(total);

  parallel_for(total, config.jobs, [&](int idx) {
    const int oi = idx / config.biasing_conditions;
    const int ci = idx % config.biasing_conditions;
    const ShapeSpec& spec = objects[oi];
    const SymmetrySet sym = symmetry_set(spec);
    Rng cell_rng = master.fork(0x10000 + idx);

    PushCondition condition;
    PreparedPush prepared;
    try {
      condition = generate_condition(spec, config, cell_rng, ci % config.n_actions);
      // Conditions (placement, contacts, pose estimate) are shared across the
      // model grid; the general-bias library provides them.
      prepared = prepare_push(condition, libraries[0], oi, config, cell_rng);
    } catch (const std::exception& e) {
      log_error(std::string("biasing condition failed: ") + e.what());
      results[idx].skipped +=
          static_cast<int>(bias_names.size() * test_names.size());
      return;
    }

    for (std::size_t bi = 0; bi < bias_names.size(); ++bi) {
      for (std::size_t ti = 0; ti < test_names.size(); ++ti) {
        try {
          Rng push_rng = cell_rng.fork(0x100 + bi * 16 + ti);
          PushOutcome outcome = execute_push(condition, prepared, libraries[bi],
                                             dists_for(test_names[ti]), config, push_rng);
          if (outcome.prediction.failed || !outcome.ground_truth_valid) {
            ++results[idx].skipped;
            continue;
          }
          results[idx].rows.push_back(
              make_row(family_name + ":" + bias_names[bi] + "->" + test_names[ti], spec.label(),
                       idx, outcome.prediction.final_pose, outcome.ground_truth_final,
                       spec.dimensions, sym));
        } catch (const std::exception& e) {
          log_error(std::string("biasing push failed: ") + e.what());
          ++results[idx].skipped;
        }
      }
    }
  });

  for (auto& res : results) {
    for (auto& row : res.rows) report.add(std::move(row));
    report.skipped += res.skipped;
  }
  return report;
}

}  // namespace pushcast
