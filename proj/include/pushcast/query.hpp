#pragma once

#include <string>
#include <vector>

#include "pushcast/contact.hpp"
#include "pushcast/density.hpp"
#include "pushcast/motion.hpp"

namespace pushcast {

enum class WeightingMode {
  Similarity,  // neighbourhood weight w_j^c * exp(-d_r)
  Literal,     // w_j^c * d_r, the formula as printed
};

std::string to_string(WeightingMode mode);
WeightingMode weighting_mode_from_string(const std::string& s);

/// One query-density kernel: a sampled cloud feature combined with a sampled
/// model frame's relation, positioned at compose(v, u).
struct QueryKernel {
  Posed pose;
  double weight = 0.0;
  int source_frame = -1;  // index into the model frames
  ContactFrame frame;     // v, r from the feature; u, h, link_point from the source
};

struct QueryDensity {
  std::vector<QueryKernel> kernels;
  double h_r = 0.0;  // selection heuristic, normalized per sampled pair
  std::string model_id;
  Bandwidths sigma;

  PoseKernelMix mix() const;
  std::vector<WeightedPose> seeds() const;
};

/// Unscaled descriptor-distance heuristic, fourth root per pair, averaged
/// over the (sampled feature, drawn frame) pairs of the kernel construction.
double selection_heuristic(const std::vector<Descriptord>& sampled,
                           const std::vector<Descriptord>& drawn_frames);

QueryDensity build_query_density(const std::vector<ContactFrame>& model_frames,
                                 const std::vector<SurfaceFeature>& cloud_features,
                                 int n_kernels, WeightingMode mode, const Bandwidths& bw,
                                 Rng& rng, const std::string& model_id = {});

struct PoseEstimate {
  Posed pose;
  double likelihood = 0.0;
  int rounds_used = 0;
};

/// Annealed argmax of the kernel mixture over SE(3); trial rounds in which
/// every seed scores zero rescale the bandwidths before retrying.
PoseEstimate estimate_pose(const QueryDensity& qd, const AnnealConfig& config,
                           const TruncationConfig& trunc0, Rng& rng);

/// Kernel nearest to the winning pose: translation distance, ties broken by
/// rotation distance, then index.
const QueryKernel& select_manipulator_frame(const QueryDensity& qd, const Posed& best_pose);

struct LibraryEntry {
  std::string shape_id;
  ShapeSpec spec;
  ManipulatorContactModel manipulator;
  EnvironmentContactModel environment;
  PositionModel position;
  MotionModel motion;
};

struct ModelLibrary {
  int format_version = 1;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<LibraryEntry> entries;

  const LibraryEntry* find(const std::string& shape_id) const;
};

struct ModelSelection {
  int entry_index = -1;
  QueryDensity density;  // manipulator query density of the winning entry
};

/// Builds one manipulator query density per library entry and returns the one
/// with the lowest selection heuristic.
ModelSelection select_model(const ModelLibrary& library,
                            const std::vector<SurfaceFeature>& cloud_features, int n_kernels,
                            WeightingMode mode, const Bandwidths& bw, Rng& rng);

}  // namespace pushcast
