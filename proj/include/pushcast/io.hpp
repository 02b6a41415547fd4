#pragma once

#include <string>
#include <vector>

#include "pushcast/eval.hpp"
#include "pushcast/query.hpp"
#include "pushcast/shapes.hpp"
#include "pushcast/sim.hpp"

namespace pushcast {

// Ascii PLY, one "x y z" vertex per line. The config hash travels in a
// comment line so downstream commands can refuse mismatched inputs.
void write_ply(const std::string& path, const PointCloud& cloud,
               const std::string& config_hash = {});
PointCloud read_ply(const std::string& path, std::string* config_hash = nullptr);

void write_obj(const std::string& path, const TriMesh& mesh);

void write_episode_csv(const std::string& path, const PushEpisode& episode);

void write_report_csv(const std::string& path, const AccuracyReport& report,
                      const std::string& config_hash);
AccuracyReport read_report_csv(const std::string& path, std::string* config_hash = nullptr);

void write_training_log_csv(const std::string& path, const MotionModel& model,
                            const std::string& config_hash);

void save_library(const std::string& path, const ModelLibrary& library);
ModelLibrary load_library(const std::string& path);

// Formats doubles so that equal values always produce identical bytes.
std::string format_double(double v);

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
LogLevel log_level();  // from PUSHCAST_LOG, defaults to info
void log_info(const std::string& message);
void log_debug(const std::string& message);
void log_error(const std::string& message);

}  // namespace pushcast
