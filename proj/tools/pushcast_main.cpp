#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "pushcast/config.hpp"
#include "pushcast/eval.hpp"
#include "pushcast/io.hpp"
#include "pushcast/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pushcast;

namespace {

json pose_json(const Posed& p) {
  return json::array({p.p.x(), p.p.y(), p.p.z(), p.q.w(), p.q.x(), p.q.y(), p.q.z()});
}

json summary_json(const AccuracyReport& report, const std::string& hash) {
  json cells = json::array();
  for (const auto& cell : report.cells()) {
    cells.push_back(json{{"condition", cell.condition},
                         {"object", cell.object},
                         {"count", cell.count},
                         {"mean_h_acc", cell.mean_h_acc},
                         {"std_h_acc", cell.std_h_acc},
                         {"mean_linear_error", cell.mean_linear_error}});
  }
  json metrics = json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = v;
  return json{{"config_hash", hash},
              {"cells", cells},
              {"metrics", metrics},
              {"skipped", report.skipped}};
}

int run_gen_object(const std::string& kind, const std::vector<double>& dims, int segments,
                   double density, std::uint64_t seed, const std::string& out_mesh,
                   const std::string& out_cloud, bool partial,
                   const std::vector<double>& viewpoint) {
  ShapeSpec spec;
  spec.kind = shape_kind_from_string(kind);
  if (dims.size() == 1)
    spec.dimensions = Eigen::Vector3d::Constant(dims[0]);
  else if (dims.size() == 3)
    spec.dimensions = Eigen::Vector3d(dims[0], dims[1], dims[2]);
  else
    throw ConfigError("--dims takes 1 or 3 values");
  spec.segments = segments;

  const TriMesh mesh = make_mesh(spec);
  if (!out_mesh.empty()) {
    write_obj(out_mesh, mesh);
    log_info("wrote " + out_mesh);
  }
  if (!out_cloud.empty()) {
    PointCloud cloud;
    if (partial) {
      const Posed rest = Posed::translation(0, 0, mesh.dims.z() / 2);
      const Eigen::Vector3d vp =
          viewpoint.size() == 3 ? Eigen::Vector3d(viewpoint[0], viewpoint[1], viewpoint[2])
                                : Eigen::Vector3d(1.2, 0.9, 0.5);
      cloud = sample_partial_cloud(mesh, rest, vp, density, seed);
    } else {
      cloud = sample_full_cloud(mesh, density, seed);
    }
    write_ply(out_cloud, cloud, config_hash(default_config()));
    log_info("wrote " + out_cloud + " (" + std::to_string(cloud.points.size()) + " points)");
  }
  return 0;
}

int run_train(const RunConfig& config, const std::string& out_path,
              const std::string& log_path) {
  const ModelLibrary library = train_library(config);
  save_library(out_path, library);
  log_info("wrote " + out_path);
  if (!log_path.empty()) {
    // One log per entry, suffixed by shape id.
    for (const auto& e : library.entries) {
      const std::string path = log_path + "." + e.shape_id + ".csv";
      write_training_log_csv(path, e.motion, library.config_hash);
      log_info("wrote " + path);
    }
  }
  return 0;
}

int run_predict(const RunConfig& config, const std::string& library_path,
                const std::string& cloud_path, int action, const std::string& out_path,
                const std::vector<double>& viewpoint) {
  const ModelLibrary library = load_library(library_path);
  const std::string hash = config_hash(config);
  if (library.config_hash != hash)
    throw ConfigError("config hash mismatch: library was trained under " + library.config_hash +
                      ", current config hashes to " + hash);

  std::string cloud_hash;
  PointCloud cloud = read_ply(cloud_path, &cloud_hash);
  if (!cloud_hash.empty() && cloud_hash != library.config_hash)
    throw ConfigError("config hash mismatch: cloud " + cloud_hash + " vs library " +
                      library.config_hash);
  if (viewpoint.size() == 3) {
    cloud.has_viewpoint = true;
    cloud.viewpoint = Eigen::Vector3d(viewpoint[0], viewpoint[1], viewpoint[2]);
  }

  PushCondition condition;
  condition.partial_cloud = cloud;
  condition.features = extract_features(cloud, {config.neighborhood_radius});
  condition.action_id = action;

  Rng rng(config.seed);
  PreparedPush prepared = prepare_push(condition, library, -1, config, rng);
  const LibraryEntry& entry = library.entries[prepared.entry_index];

  std::vector<ContactFrame> frames;
  frames.push_back(prepared.manipulator_frame);
  frames.insert(frames.end(), prepared.environment_frames.begin(),
                prepared.environment_frames.end());
  PredictConfig pc;
  pc.env_kernels = config.predict_env_kernels;
  pc.manip_kernels = config.predict_manip_kernels;
  pc.anneal = config.motion_anneal;
  pc.anneal.trans_std = std::sqrt(config.bandwidths.sigma_pm);
  Rng predict_rng = rng.fork(0x7072656469ull);
  const Prediction prediction =
      predict(entry.motion, action, frames, prepared.pose_estimate.pose, pc, config.bandwidths,
              config.truncation, predict_rng);

  const json record{{"config_hash", hash},
                    {"seed", config.seed},
                    {"action", action},
                    {"selected_entry", entry.shape_id},
                    {"selection_h_r", prepared.selection_h_r},
                    {"robot_placement", pose_json(prepared.robot_placement)},
                    {"pusher_start", pose_json(prepared.pusher_start)},
                    {"pose_estimate", pose_json(prepared.pose_estimate.pose)},
                    {"pose_likelihood", prepared.pose_estimate.likelihood},
                    {"predicted_motion", pose_json(prediction.global_motion)},
                    {"predicted_final_pose", pose_json(prediction.final_pose)},
                    {"log_likelihood", prediction.log_likelihood},
                    {"prediction_failed", prediction.failed},
                    {"rescale_rounds", std::max(prepared.rounds_used, prediction.rounds_used)}};
  if (out_path.empty()) {
    std::cout << record.dump(1) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << record.dump(1) << "\n";
    log_info("wrote " + out_path);
  }
  return 0;
}

int run_evaluate(const RunConfig& config) {
  fs::create_directories(config.output_dir);
  Rng rng(config.seed);
  AccuracyReport report;
  if (config.experiment == "selection")
    report = run_selection_experiment(config, rng);
  else if (config.experiment == "pose")
    report = run_pose_experiment(config, rng);
  else if (config.experiment == "biasing-friction")
    report = run_biasing_experiment(config, BiasFamily::Friction, rng);
  else if (config.experiment == "biasing-mass")
    report = run_biasing_experiment(config, BiasFamily::Mass, rng);
  else
    throw ConfigError("unknown experiment kind: " + config.experiment);

  const std::string hash = config_hash(config);
  const std::string csv = (fs::path(config.output_dir) / "report.csv").string();
  const std::string summary = (fs::path(config.output_dir) / "summary.json").string();
  write_report_csv(csv, report, hash);
  {
    std::ofstream out(summary);
    if (!out) throw std::runtime_error("cannot open for writing: " + summary);
    out << summary_json(report, hash).dump(1) << "\n";
  }
  log_info("wrote " + csv + " and " + summary);
  if (report.skipped > 0) log_info("skipped pushes: " + std::to_string(report.skipped));
  return 0;
}

int run_report(const std::string& in_path, const std::string& out_path) {
  std::string hash;
  const AccuracyReport report = read_report_csv(in_path, &hash);
  const json summary = summary_json(report, hash);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << summary.dump(1) << "\n";
    log_info("wrote " + out_path);
  }
  for (const auto& cell : report.cells()) {
    std::cout << cell.condition << (cell.object.empty() ? "" : " / " + cell.object) << ": n="
              << cell.count << " mean_h_acc=" << cell.mean_h_acc
              << " std=" << cell.std_h_acc << " mean_linear=" << cell.mean_linear_error
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Push-manipulation forward-model toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_path, library_path, cloud_path, in_path;
  std::string kind = "cube";
  std::vector<double> dims{0.2};
  std::vector<double> viewpoint;
  int segments = 64, action = 0;
  double density = 10000;
  std::uint64_t seed_flag = 0;
  bool seed_given = false, partial = false;
  int jobs_flag = 0;

  auto* gen = app.add_subcommand("gen-object", "Generate a mesh and point cloud");
  gen->add_option("--kind", kind, "cube|box|cylinder|hybrid|notched-cube");
  gen->add_option("--dims", dims, "1 or 3 dimensions, metres")->expected(-1);
  gen->add_option("--segments", segments, "facets for curved shapes");
  gen->add_option("--density", density, "points per m^2");
  gen->add_option("--seed", seed_flag, "sampling seed");
  gen->add_option("--out-mesh", out_path, "OBJ output path");
  std::string out_cloud;
  gen->add_option("--out-cloud", out_cloud, "PLY output path");
  gen->add_flag("--partial", partial, "single-view capture instead of full coverage");
  gen->add_option("--viewpoint", viewpoint, "camera position for --partial")->expected(3);

  auto* train = app.add_subcommand("train", "Train a model library");
  train->add_option("--config", config_path, "JSON config");
  train->add_option("--out", out_path, "library output path")->required();
  train->add_option("--log", log_path, "training-log CSV prefix");
  train->add_option("--seed", seed_flag, "override config seed");
  train->add_option("--jobs", jobs_flag, "worker threads");

  auto* predict_cmd = app.add_subcommand("predict", "Predict a push outcome for a cloud");
  predict_cmd->add_option("--config", config_path, "JSON config");
  predict_cmd->add_option("--library", library_path, "model library")->required();
  predict_cmd->add_option("--cloud", cloud_path, "partial cloud PLY")->required();
  predict_cmd->add_option("--action", action, "action id");
  predict_cmd->add_option("--seed", seed_flag, "override config seed");
  predict_cmd->add_option("--viewpoint", viewpoint, "camera position used for the capture")
      ->expected(3);
  predict_cmd->add_option("--out", out_path, "output JSON (stdout if omitted)");

  auto* evaluate = app.add_subcommand("evaluate", "Run an experiment harness");
  evaluate->add_option("--config", config_path, "JSON config");
  evaluate->add_option("--seed", seed_flag, "override config seed");
  evaluate->add_option("--jobs", jobs_flag, "worker threads");
  std::string out_dir;
  evaluate->add_option("--out-dir", out_dir, "override config output_dir");

  auto* report_cmd = app.add_subcommand("report", "Summarize a report CSV");
  report_cmd->add_option("--in", in_path, "report CSV")->required();
  report_cmd->add_option("--out", out_path, "summary JSON path");

  for (auto* cmd : {train, predict_cmd, evaluate})
    cmd->get_option("--seed")->each([&](const std::string&) { seed_given = true; });
  gen->get_option("--seed")->each([&](const std::string&) { seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = config_path.empty() ? default_config() : load_config_file(config_path);
    if (seed_given) config.seed = seed_flag;
    if (jobs_flag > 0) config.jobs = jobs_flag;
    if (!out_dir.empty()) config.output_dir = out_dir;

    if (gen->parsed())
      return run_gen_object(kind, dims, segments, density, seed_flag, out_path, out_cloud,
                            partial, viewpoint);
    if (train->parsed()) return run_train(config, out_path, log_path);
    if (predict_cmd->parsed())
      return run_predict(config, library_path, cloud_path, action, out_path, viewpoint);
    if (evaluate->parsed()) return run_evaluate(config);
    if (report_cmd->parsed()) return run_report(in_path, out_path);
  } catch (const ConfigError& e) {
    log_error(e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return 0;
}
