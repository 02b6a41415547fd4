#include "pushcast/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "pushcast/config.hpp"

namespace pushcast {

using nlohmann::json;

namespace {

std::mutex log_mutex;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

json pose_to_json(const Posed& p) {
  return json::array(
      {p.p.x(), p.p.y(), p.p.z(), p.q.w(), p.q.x(), p.q.y(), p.q.z()});
}

Posed pose_from_json(const json& a) {
  if (!a.is_array() || a.size() != 7) throw std::runtime_error("pose must be 7 numbers");
  // Values were normalized before saving; assigning verbatim keeps the
  // round trip bit-exact.
  Posed out;
  out.p = Eigen::Vector3d(a[0], a[1], a[2]);
  out.q = Eigen::Quaterniond(a[3], a[4], a[5], a[6]);
  return out;
}

json frame_to_json(const ContactFrame& f) {
  return json{{"v", pose_to_json(f.v)},
              {"r", {f.r.x(), f.r.y()}},
              {"u", pose_to_json(f.u)},
              {"h", pose_to_json(f.h)},
              {"kind", to_string(f.kind)},
              {"w", f.w},
              {"link_point", {f.link_point.x(), f.link_point.y(), f.link_point.z()}}};
}

ContactFrame frame_from_json(const json& j) {
  ContactFrame f;
  f.v = pose_from_json(j.at("v"));
  f.r = Descriptord(j.at("r").at(0), j.at("r").at(1));
  f.u = pose_from_json(j.at("u"));
  f.h = pose_from_json(j.at("h"));
  f.kind = frame_kind_from_string(j.at("kind"));
  f.w = j.at("w");
  const auto& lp = j.at("link_point");
  f.link_point = Eigen::Vector3d(lp.at(0), lp.at(1), lp.at(2));
  return f;
}

json bandwidths_to_json(const Bandwidths& b) {
  return json{{"sigma_p", b.sigma_p},
              {"sigma_q", b.sigma_q},
              {"sigma_r", {b.sigma_r.x(), b.sigma_r.y()}},
              {"sigma_pm", b.sigma_pm},
              {"sigma_qm", b.sigma_qm}};
}

Bandwidths bandwidths_from_json(const json& j) {
  Bandwidths b;
  b.sigma_p = j.at("sigma_p");
  b.sigma_q = j.at("sigma_q");
  b.sigma_r = Descriptord(j.at("sigma_r").at(0), j.at("sigma_r").at(1));
  b.sigma_pm = j.at("sigma_pm");
  b.sigma_qm = j.at("sigma_qm");
  return b;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_ply(const std::string& path, const PointCloud& cloud,
               const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  if (!config_hash.empty()) out << "comment config_hash " << config_hash << "\n";
  out << "element vertex " << cloud.points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\nend_header\n";
  for (const auto& p : cloud.points)
    out << format_double(p.x()) << " " << format_double(p.y()) << " " << format_double(p.z())
        << "\n";
}

PointCloud read_ply(const std::string& path, std::string* config_hash) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t count = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.rfind("comment config_hash ", 0) == 0 && config_hash)
      *config_hash = line.substr(20);
    if (line.rfind("element vertex ", 0) == 0) count = std::stoul(line.substr(15));
    if (line == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw std::runtime_error("malformed PLY header: " + path);
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double x, y, z;
    if (!(in >> x >> y >> z)) throw std::runtime_error("truncated PLY body: " + path);
    cloud.points.emplace_back(x, y, z);
  }
  if (cloud.points.empty()) throw std::runtime_error("empty point cloud: " + path);
  return cloud;
}

void write_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out = open_out(path);
  for (const auto& v : mesh.vertices)
    out << "v " << format_double(v.x()) << " " << format_double(v.y()) << " "
        << format_double(v.z()) << "\n";
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

void write_episode_csv(const std::string& path, const PushEpisode& episode) {
  std::ofstream out = open_out(path);
  out << "t,x,y,yaw\n";
  for (std::size_t i = 0; i < episode.times.size(); ++i) {
    const Posed& p = episode.object_traj[i];
    const double yaw = std::atan2(2.0 * (p.q.w() * p.q.z() + p.q.x() * p.q.y()),
                                  1.0 - 2.0 * (p.q.y() * p.q.y() + p.q.z() * p.q.z()));
    out << format_double(episode.times[i]) << "," << format_double(p.p.x()) << ","
        << format_double(p.p.y()) << "," << format_double(yaw) << "\n";
  }
}

void write_report_csv(const std::string& path, const AccuracyReport& report,
                      const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "condition,object,push_id,h_acc,linear_error_m,angular_error_rad\n";
  for (const auto& row : report.rows)
    out << row.condition << "," << row.object << "," << row.push_id << ","
        << format_double(row.h_acc) << "," << format_double(row.linear_error_m) << ","
        << format_double(row.angular_error_rad) << "\n";
}

AccuracyReport read_report_csv(const std::string& path, std::string* config_hash) {
  std::ifstream in = open_in(path);
  std::string line;
  AccuracyReport report;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config_hash=", 0) == 0) {
      if (config_hash) *config_hash = line.substr(14);
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream ss(line);
    AccuracyRow row;
    std::string field;
    std::getline(ss, row.condition, ',');
    std::getline(ss, row.object, ',');
    std::getline(ss, field, ',');
    row.push_id = std::stoi(field);
    std::getline(ss, field, ',');
    row.h_acc = std::stod(field);
    std::getline(ss, field, ',');
    row.linear_error_m = std::stod(field);
    std::getline(ss, field, ',');
    row.angular_error_rad = std::stod(field);
    report.add(std::move(row));
  }
  return report;
}

void write_training_log_csv(const std::string& path, const MotionModel& model,
                            const std::string& config_hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << config_hash << "\n";
  out << "action_id,mass,ground_friction,px,py,pz,qw,qx,qy,qz\n";
  for (const auto& rec : model.records) {
    const Posed& m = rec.global_motion;
    out << rec.action_id << "," << format_double(rec.params.mass) << ","
        << format_double(rec.params.ground_friction) << "," << format_double(m.p.x()) << ","
        << format_double(m.p.y()) << "," << format_double(m.p.z()) << ","
        << format_double(m.q.w()) << "," << format_double(m.q.x()) << ","
        << format_double(m.q.y()) << "," << format_double(m.q.z()) << "\n";
  }
}

void save_library(const std::string& path, const ModelLibrary& library) {
  json entries = json::array();
  for (const auto& e : library.entries) {
    json frames_m = json::array(), frames_e = json::array(), frames_p = json::array();
    for (const auto& f : e.manipulator.frames) frames_m.push_back(frame_to_json(f));
    for (const auto& f : e.environment.frames) frames_e.push_back(frame_to_json(f));
    for (const auto& f : e.position.frames) frames_p.push_back(frame_to_json(f));
    json actions = json::array();
    for (const auto& a : e.motion.actions)
      actions.push_back(json{{"id", a.id},
                             {"linear_velocity", a.linear_velocity},
                             {"angular_velocity_deg", a.angular_velocity_deg},
                             {"duration", a.duration},
                             {"speed", a.speed}});
    json records = json::array();
    for (const auto& rec : e.motion.records) {
      json frames = json::array(), motions = json::array();
      for (const auto& f : rec.frames) frames.push_back(frame_to_json(f));
      for (const auto& m : rec.local_motions) motions.push_back(pose_to_json(m));
      records.push_back(json{{"action_id", rec.action_id},
                             {"params",
                              {{"mass", rec.params.mass},
                               {"ground_friction", rec.params.ground_friction},
                               {"pusher_friction", rec.params.pusher_friction}}},
                             {"frames", frames},
                             {"local_motions", motions},
                             {"global_motion", pose_to_json(rec.global_motion)}});
    }
    entries.push_back(json{
        {"shape_id", e.shape_id},
        {"spec", shape_spec_to_json(e.spec)},
        {"manipulator",
         {{"shape_id", e.manipulator.shape_id},
          {"link_mesh_id", e.manipulator.link_mesh_id},
          {"frames", frames_m}}},
        {"environment", {{"frames", frames_e}}},
        {"position", {{"shape_id", e.position.shape_id}, {"frames", frames_p}}},
        {"motion",
         {{"sigma", bandwidths_to_json(e.motion.sigma)},
          {"actions", actions},
          {"records", records}}},
    });
  }
  const json doc{{"format_version", library.format_version},
                 {"seed", library.seed},
                 {"config_hash", library.config_hash},
                 {"entries", entries}};
  std::ofstream out = open_out(path);
  out << doc.dump(1) << "\n";
}

ModelLibrary load_library(const std::string& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed model library " + path + ": " + e.what());
  }
  ModelLibrary lib;
  lib.format_version = doc.at("format_version");
  if (lib.format_version != 1)
    throw std::runtime_error("model library " + path + ": unsupported format_version " +
                             std::to_string(lib.format_version));
  lib.seed = doc.at("seed");
  lib.config_hash = doc.at("config_hash");
  for (const auto& je : doc.at("entries")) {
    LibraryEntry e;
    e.shape_id = je.at("shape_id");
    e.spec = shape_spec_from_json(je.at("spec"), "library.spec");
    e.manipulator.shape_id = je.at("manipulator").at("shape_id");
    e.manipulator.link_mesh_id = je.at("manipulator").at("link_mesh_id");
    for (const auto& f : je.at("manipulator").at("frames"))
      e.manipulator.frames.push_back(frame_from_json(f));
    for (const auto& f : je.at("environment").at("frames"))
      e.environment.frames.push_back(frame_from_json(f));
    e.position.shape_id = je.at("position").at("shape_id");
    for (const auto& f : je.at("position").at("frames"))
      e.position.frames.push_back(frame_from_json(f));
    e.motion.sigma = bandwidths_from_json(je.at("motion").at("sigma"));
    for (const auto& a : je.at("motion").at("actions"))
      e.motion.actions.push_back(Action{a.at("id"), a.at("linear_velocity"),
                                        a.at("angular_velocity_deg"), a.at("duration"),
                                        a.at("speed")});
    for (const auto& r : je.at("motion").at("records")) {
      PushDataRecord rec;
      rec.action_id = r.at("action_id");
      rec.params.mass = r.at("params").at("mass");
      rec.params.ground_friction = r.at("params").at("ground_friction");
      rec.params.pusher_friction = r.at("params").at("pusher_friction");
      for (const auto& f : r.at("frames")) rec.frames.push_back(frame_from_json(f));
      for (const auto& m : r.at("local_motions")) rec.local_motions.push_back(pose_from_json(m));
      rec.global_motion = pose_from_json(r.at("global_motion"));
      e.motion.records.push_back(std::move(rec));
    }
    lib.entries.push_back(std::move(e));
  }
  return lib;
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PUSHCAST_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log_error(const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[pushcast] error: " << message << "\n";
}

void log_info(const std::string& message) {
  if (log_level() < LogLevel::Info) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[pushcast] " << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_level() < LogLevel::Debug) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[pushcast] debug: " << message << "\n";
}

}  // namespace pushcast
