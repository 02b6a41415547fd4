#include "pushcast/config.hpp"

#include <fstream>
#include <set>

namespace pushcast {

namespace {

using nlohmann::json;

// Tracks consumed keys of one JSON object and reports unknown leftovers with
// their dotted path.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object())
      throw ConfigError("config error at " + (path_.empty() ? "<root>" : path_) +
                        ": expected an object");
  }

  bool has(const std::string& key) {
    return node_.contains(key);
  }

  const json* get(const std::string& key) {
    if (!node_.contains(key)) return nullptr;
    used_.insert(key);
    return &node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_number()) fail(key, "expected a number");
    return j->get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_number_integer()) fail(key, "expected an integer");
    return j->get<int>();
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_number_unsigned() && !j->is_number_integer()) fail(key, "expected an integer");
    return j->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_boolean()) fail(key, "expected a boolean");
    return j->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_string()) fail(key, "expected a string");
    return j->get<std::string>();
  }

  Eigen::Vector3d vec3(const std::string& key, const Eigen::Vector3d& fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_array() || j->size() != 3) fail(key, "expected an array of 3 numbers");
    return {j->at(0).get<double>(), j->at(1).get<double>(), j->at(2).get<double>()};
  }

  Descriptord vec2(const std::string& key, const Descriptord& fallback) {
    const json* j = get(key);
    if (!j) return fallback;
    if (!j->is_array() || j->size() != 2) fail(key, "expected an array of 2 numbers");
    return {j->at(0).get<double>(), j->at(1).get<double>()};
  }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) {
    throw ConfigError("config error at " + child_path(key) + ": " + message);
  }

  void finish() {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.contains(it.key()))
        throw ConfigError("config error at " + child_path(it.key()) + ": unknown key '" +
                          it.key() + "'");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

AnnealConfig parse_anneal(const json& node, const std::string& path, AnnealConfig base) {
  ObjectReader r(node, path);
  base.candidates = r.integer("candidates", base.candidates);
  base.steps = r.integer("steps", base.steps);
  base.temp_start = r.number("temp_start", base.temp_start);
  base.temp_end = r.number("temp_end", base.temp_end);
  base.rot_std = r.number("rot_std", base.rot_std);
  base.planar = r.boolean("planar", base.planar);
  r.finish();
  return base;
}

json anneal_to_json(const AnnealConfig& a) {
  return json{{"candidates", a.candidates}, {"steps", a.steps},     {"temp_start", a.temp_start},
              {"temp_end", a.temp_end},     {"rot_std", a.rot_std}, {"planar", a.planar}};
}

}  // namespace

ParameterDistribution distribution_from_json(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  if (r.has("preset")) {
    const std::string name = r.text("preset", "");
    r.finish();
    try {
      return ParameterDistribution::preset(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config error at " + path + ": " + e.what());
    }
  }
  const std::string type = r.text("type", "");
  ParameterDistribution out;
  if (type == "dirac") {
    out = ParameterDistribution::dirac(r.number("value", 0.0));
  } else if (type == "uniform") {
    const double a = r.number("a", 0.0), b = r.number("b", 0.0);
    if (!(a < b)) r.fail("a", "uniform distribution requires a < b");
    out = ParameterDistribution::uniform(a, b);
  } else if (type == "gaussian") {
    const double mean = r.number("mean", 0.0), sd = r.number("sd", 0.0);
    if (!(sd > 0)) r.fail("sd", "gaussian distribution requires sd > 0");
    out = ParameterDistribution::gaussian(mean, sd);
  } else {
    r.fail("type", "expected dirac, uniform or gaussian");
  }
  r.finish();
  return out;
}

json distribution_to_json(const ParameterDistribution& dist) {
  switch (dist.kind) {
    case ParameterDistribution::Kind::Dirac:
      return json{{"type", "dirac"}, {"value", dist.a}};
    case ParameterDistribution::Kind::Uniform:
      return json{{"type", "uniform"}, {"a", dist.a}, {"b", dist.b}};
    case ParameterDistribution::Kind::Gaussian:
      return json{{"type", "gaussian"}, {"mean", dist.a}, {"sd", dist.b}};
  }
  throw std::logic_error("unreachable");
}

ShapeSpec shape_spec_from_json(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  ShapeSpec spec;
  const std::string kind = r.text("kind", "cube");
  try {
    spec.kind = shape_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config error at " + path + ".kind: " + e.what());
  }
  spec.dimensions = r.vec3("dimensions", Eigen::Vector3d::Constant(0.2));
  spec.segments = r.integer("segments", 64);
  if (!(spec.dimensions.minCoeff() > 0)) r.fail("dimensions", "must be positive");
  r.finish();
  return spec;
}

json shape_spec_to_json(const ShapeSpec& spec) {
  return json{{"kind", to_string(spec.kind)},
              {"dimensions", {spec.dimensions.x(), spec.dimensions.y(), spec.dimensions.z()}},
              {"segments", spec.segments}};
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const json& doc) {
  RunConfig c;
  ObjectReader root(doc, "");

  c.seed = root.uinteger("seed", c.seed);
  c.jobs = root.integer("jobs", c.jobs);
  c.output_dir = root.text("output_dir", c.output_dir);

  if (const json* j = root.get("cloud")) {
    ObjectReader r(*j, "cloud");
    c.cloud_density = r.number("density", c.cloud_density);
    c.neighborhood_radius = r.number("neighborhood_radius", c.neighborhood_radius);
    c.viewpoint = r.vec3("viewpoint", c.viewpoint);
    r.finish();
  }
  if (const json* j = root.get("bandwidths")) {
    ObjectReader r(*j, "bandwidths");
    c.bandwidths.sigma_p = r.number("sigma_p", c.bandwidths.sigma_p);
    c.bandwidths.sigma_q = r.number("sigma_q", c.bandwidths.sigma_q);
    c.bandwidths.sigma_r = r.vec2("sigma_r", c.bandwidths.sigma_r);
    c.bandwidths.sigma_pm = r.number("sigma_pm", c.bandwidths.sigma_pm);
    c.bandwidths.sigma_qm = r.number("sigma_qm", c.bandwidths.sigma_qm);
    r.finish();
  }
  if (const json* j = root.get("truncation")) {
    ObjectReader r(*j, "truncation");
    c.truncation.delta_p = r.number("delta_p", c.truncation.delta_p);
    c.truncation.delta_q = r.number("delta_q", c.truncation.delta_q);
    c.truncation.delta_r = r.number("delta_r", c.truncation.delta_r);
    c.truncation.alpha_t = r.number("alpha_t", c.truncation.alpha_t);
    c.truncation.max_rounds = r.integer("max_rounds", c.truncation.max_rounds);
    if (!(c.truncation.alpha_t > 1)) r.fail("alpha_t", "must be > 1");
    r.finish();
  }
  if (const json* j = root.get("contact")) {
    ObjectReader r(*j, "contact");
    c.contact_delta = r.number("delta", c.contact_delta);
    c.contact_lambda = r.number("lambda", c.contact_lambda);
    r.finish();
  }
  if (const json* j = root.get("environment")) {
    ObjectReader r(*j, "environment");
    c.env_train_contacts = r.integer("train_contacts", c.env_train_contacts);
    c.env_predict_contacts = r.integer("predict_contacts", c.env_predict_contacts);
    c.env_predict_samples = r.integer("predict_samples", c.env_predict_samples);
    c.env_model_max_kernels = r.integer("max_model_kernels", c.env_model_max_kernels);
    r.finish();
  }
  if (const json* j = root.get("actions")) {
    ObjectReader r(*j, "actions");
    c.n_actions = r.integer("count", c.n_actions);
    if (const json* range = r.get("angle_range")) {
      if (!range->is_array() || range->size() != 2) r.fail("angle_range", "expected [min, max]");
      c.angle_min_deg = range->at(0).get<double>();
      c.angle_max_deg = range->at(1).get<double>();
    }
    c.action_duration = r.number("duration", c.action_duration);
    c.action_speed = r.number("speed", c.action_speed);
    r.finish();
  }
  if (const json* j = root.get("training")) {
    ObjectReader r(*j, "training");
    c.samples_per_action = r.integer("samples_per_action", c.samples_per_action);
    if (const json* d = r.get("mass"))
      c.params.mass = distribution_from_json(*d, "training.mass");
    if (const json* d = r.get("ground_friction"))
      c.params.ground_friction = distribution_from_json(*d, "training.ground_friction");
    if (const json* d = r.get("pusher_friction"))
      c.params.pusher_friction = distribution_from_json(*d, "training.pusher_friction");
    r.finish();
  }
  if (const json* j = root.get("query")) {
    ObjectReader r(*j, "query");
    c.pose_kernels = r.integer("pose_kernels", c.pose_kernels);
    c.contact_kernels = r.integer("contact_kernels", c.contact_kernels);
    const std::string mode = r.text("weighting_mode", to_string(c.weighting_mode));
    try {
      c.weighting_mode = weighting_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config error at query.weighting_mode: ") + e.what());
    }
    r.finish();
  }
  if (const json* j = root.get("pose_anneal"))
    c.pose_anneal = parse_anneal(*j, "pose_anneal", c.pose_anneal);
  if (const json* j = root.get("motion_anneal"))
    c.motion_anneal = parse_anneal(*j, "motion_anneal", c.motion_anneal);
  if (const json* j = root.get("prediction")) {
    ObjectReader r(*j, "prediction");
    c.predict_env_kernels = r.integer("env_kernels", c.predict_env_kernels);
    c.predict_manip_kernels = r.integer("manip_kernels", c.predict_manip_kernels);
    r.finish();
  }
  if (const json* j = root.get("sim")) {
    ObjectReader r(*j, "sim");
    c.sim.dt = r.number("dt", c.sim.dt);
    c.sim.support_points = r.integer("support_points", c.sim.support_points);
    c.sim.load_force = r.number("load_force", c.sim.load_force);
    c.sim.gravity = r.number("gravity", c.sim.gravity);
    c.sim.ke_threshold = r.number("ke_threshold", c.sim.ke_threshold);
    r.finish();
  }
  if (const json* j = root.get("bumper")) {
    ObjectReader r(*j, "bumper");
    c.bumper.width = r.number("width", c.bumper.width);
    c.bumper.depth = r.number("depth", c.bumper.depth);
    c.bumper.height = r.number("height", c.bumper.height);
    r.finish();
  }
  if (const json* j = root.get("experiment")) {
    ObjectReader r(*j, "experiment");
    c.experiment = r.text("kind", c.experiment);
    c.n_conditions = r.integer("conditions", c.n_conditions);
    c.pose_runs = r.integer("pose_runs", c.pose_runs);
    c.biasing_conditions = r.integer("biasing_conditions", c.biasing_conditions);
    c.scene_offset = r.number("scene_offset", c.scene_offset);
    if (c.experiment != "selection" && c.experiment != "pose" &&
        c.experiment != "biasing-friction" && c.experiment != "biasing-mass")
      r.fail("kind", "expected selection, pose, biasing-friction or biasing-mass");
    r.finish();
  }
  if (const json* j = root.get("objects")) {
    if (!j->is_array()) root.fail("objects", "expected an array");
    c.train_objects.clear();
    for (std::size_t i = 0; i < j->size(); ++i)
      c.train_objects.push_back(
          shape_spec_from_json(j->at(i), "objects[" + std::to_string(i) + "]"));
    if (c.train_objects.empty()) root.fail("objects", "needs at least one shape");
  }
  root.finish();
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& c) {
  json objects = json::array();
  for (const auto& spec : c.train_objects) objects.push_back(shape_spec_to_json(spec));
  return json{
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"output_dir", c.output_dir},
      {"cloud",
       {{"density", c.cloud_density},
        {"neighborhood_radius", c.neighborhood_radius},
        {"viewpoint", {c.viewpoint.x(), c.viewpoint.y(), c.viewpoint.z()}}}},
      {"bandwidths",
       {{"sigma_p", c.bandwidths.sigma_p},
        {"sigma_q", c.bandwidths.sigma_q},
        {"sigma_r", {c.bandwidths.sigma_r.x(), c.bandwidths.sigma_r.y()}},
        {"sigma_pm", c.bandwidths.sigma_pm},
        {"sigma_qm", c.bandwidths.sigma_qm}}},
      {"truncation",
       {{"delta_p", c.truncation.delta_p},
        {"delta_q", c.truncation.delta_q},
        {"delta_r", c.truncation.delta_r},
        {"alpha_t", c.truncation.alpha_t},
        {"max_rounds", c.truncation.max_rounds}}},
      {"contact", {{"delta", c.contact_delta}, {"lambda", c.contact_lambda}}},
      {"environment",
       {{"train_contacts", c.env_train_contacts},
        {"predict_contacts", c.env_predict_contacts},
        {"predict_samples", c.env_predict_samples},
        {"max_model_kernels", c.env_model_max_kernels}}},
      {"actions",
       {{"count", c.n_actions},
        {"angle_range", {c.angle_min_deg, c.angle_max_deg}},
        {"duration", c.action_duration},
        {"speed", c.action_speed}}},
      {"training",
       {{"samples_per_action", c.samples_per_action},
        {"mass", distribution_to_json(c.params.mass)},
        {"ground_friction", distribution_to_json(c.params.ground_friction)},
        {"pusher_friction", distribution_to_json(c.params.pusher_friction)}}},
      {"query",
       {{"pose_kernels", c.pose_kernels},
        {"contact_kernels", c.contact_kernels},
        {"weighting_mode", to_string(c.weighting_mode)}}},
      {"pose_anneal", anneal_to_json(c.pose_anneal)},
      {"motion_anneal", anneal_to_json(c.motion_anneal)},
      {"prediction",
       {{"env_kernels", c.predict_env_kernels}, {"manip_kernels", c.predict_manip_kernels}}},
      {"sim",
       {{"dt", c.sim.dt},
        {"support_points", c.sim.support_points},
        {"load_force", c.sim.load_force},
        {"gravity", c.sim.gravity},
        {"ke_threshold", c.sim.ke_threshold}}},
      {"bumper",
       {{"width", c.bumper.width}, {"depth", c.bumper.depth}, {"height", c.bumper.height}}},
      {"experiment",
       {{"kind", c.experiment},
        {"conditions", c.n_conditions},
        {"pose_runs", c.pose_runs},
        {"biasing_conditions", c.biasing_conditions},
        {"scene_offset", c.scene_offset}}},
      {"objects", objects},
  };
}

std::string config_hash(const RunConfig& config) {
  // Seed, worker count and output paths do not change what is computed.
  RunConfig canonical = config;
  canonical.seed = 0;
  canonical.jobs = 1;
  canonical.output_dir.clear();
  const std::string dump = config_to_json(canonical).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pushcast
