#include "pushcast/query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pushcast {

std::string to_string(WeightingMode mode) {
  return mode == WeightingMode::Similarity ? "similarity" : "literal";
}

WeightingMode weighting_mode_from_string(const std::string& s) {
  if (s == "similarity") return WeightingMode::Similarity;
  if (s == "literal") return WeightingMode::Literal;
  throw std::invalid_argument("unknown weighting mode: " + s);
}

PoseKernelMix QueryDensity::mix() const {
  PoseKernelMix mix;
  const int n = static_cast<int>(kernels.size());
  mix.P.resize(3, n);
  mix.Q.resize(4, n);
  mix.w.resize(n);
  for (int i = 0; i < n; ++i) {
    mix.P.col(i) = kernels[i].pose.p;
    mix.Q.col(i) = kernels[i].pose.q.coeffs();
    mix.w(i) = kernels[i].weight;
  }
  mix.sigma_p = sigma.sigma_p;
  mix.sigma_q = sigma.sigma_q;
  return mix;
}

std::vector<WeightedPose> QueryDensity::seeds() const {
  std::vector<WeightedPose> out;
  out.reserve(kernels.size());
  for (const auto& k : kernels) out.push_back({k.pose, k.weight});
  return out;
}

double selection_heuristic(const std::vector<Descriptord>& sampled,
                           const std::vector<Descriptord>& drawn_frames) {
  if (sampled.empty() || sampled.size() != drawn_frames.size())
    throw std::invalid_argument("selection_heuristic: needs matched descriptor pairs");
  double sum = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const double d = (sampled[i] - drawn_frames[i]).squaredNorm();  // identity-weighted
    sum += std::sqrt(std::sqrt(d));
  }
  return sum / static_cast<double>(sampled.size());
}

QueryDensity build_query_density(const std::vector<ContactFrame>& model_frames,
                                 const std::vector<SurfaceFeature>& cloud_features,
                                 int n_kernels, WeightingMode mode, const Bandwidths& bw,
                                 Rng& rng, const std::string& model_id) {
  if (model_frames.empty()) throw std::invalid_argument("build_query_density: empty model");
  if (cloud_features.empty()) throw std::invalid_argument("build_query_density: empty cloud");
  if (n_kernels < 1) throw std::invalid_argument("build_query_density: n_kernels must be >= 1");

  const int nf = static_cast<int>(cloud_features.size());
  const int nm = static_cast<int>(model_frames.size());

  // Neighbourhood weights per distinct sampled feature.
  struct Row {
    std::vector<double> cumulative;
    double total = 0;
    double weight_sum = 0;  // Eq-17 weight before normalization
  };
  std::vector<Row> cache(nf);
  std::vector<bool> cached(nf, false);

  auto row_for = [&](int fi) -> const Row& {
    if (cached[fi]) return cache[fi];
    Row row;
    row.cumulative.resize(nm);
    const Descriptord& rx = cloud_features[fi].r;
    for (int j = 0; j < nm; ++j) {
      const double d = dist_r(rx, model_frames[j].r, bw.sigma_r);
      const double wn = mode == WeightingMode::Similarity
                            ? model_frames[j].w * std::exp(-d)
                            : model_frames[j].w * d;
      row.weight_sum += wn;
      row.total += wn;
      row.cumulative[j] = row.total;
    }
    cache[fi] = std::move(row);
    cached[fi] = true;
    return cache[fi];
  };

  QueryDensity qd;
  qd.model_id = model_id;
  qd.sigma = bw;
  qd.kernels.reserve(n_kernels);
  double h_r_sum = 0;
  double weight_total = 0;
  for (int i = 0; i < n_kernels; ++i) {
    const int fi = static_cast<int>(rng.uniform_index(nf));
    const Row& row = row_for(fi);
    int j;
    if (row.total > 0) {
      const double u = rng.uniform() * row.total;
      j = static_cast<int>(std::distance(
          row.cumulative.begin(),
          std::lower_bound(row.cumulative.begin(), row.cumulative.end(), u)));
      j = std::min(j, nm - 1);
    } else {
      j = static_cast<int>(rng.uniform_index(nm));
    }
    const SurfaceFeature& x = cloud_features[fi];
    const ContactFrame& src = model_frames[j];

    QueryKernel kernel;
    kernel.pose = compose(x.v, src.u);
    kernel.weight = row.weight_sum;
    kernel.source_frame = j;
    kernel.frame = src;
    kernel.frame.v = x.v;
    kernel.frame.r = x.r;
    weight_total += kernel.weight;
    // Heuristic over the pair actually drawn for this kernel.
    h_r_sum += std::sqrt(std::sqrt((x.r - src.r).squaredNorm()));
    qd.kernels.push_back(std::move(kernel));
  }

  if (weight_total > 0) {
    for (auto& k : qd.kernels) k.weight /= weight_total;
  } else {
    const double uniform = 1.0 / static_cast<double>(qd.kernels.size());
    for (auto& k : qd.kernels) k.weight = uniform;
  }
  qd.h_r = h_r_sum / static_cast<double>(n_kernels);
  return qd;
}

PoseEstimate estimate_pose(const QueryDensity& qd, const AnnealConfig& config,
                           const TruncationConfig& trunc0, Rng& rng) {
  if (qd.kernels.empty()) throw std::invalid_argument("estimate_pose: empty query density");
  const PoseKernelMix mix = qd.mix();
  const std::vector<WeightedPose> seeds = qd.seeds();

  TruncationConfig trunc = trunc0;
  const int start_rounds = trunc.rounds();
  for (;;) {
    FailureStats stats;
    bool any = false;
    for (const auto& s : seeds) {
      if (mix.eval(s.pose, trunc, &stats) > 0) {
        any = true;
        break;
      }
    }
    if (any) break;
    trunc = rescale_on_failure(trunc, stats);  // throws past the cap
  }

  const auto score = [&](const Posed& pose) { return mix.eval(pose, trunc); };
  const AnnealResult best = anneal(score, seeds, config, rng);
  return {best.pose, best.score, trunc.rounds() - start_rounds};
}

const QueryKernel& select_manipulator_frame(const QueryDensity& qd, const Posed& best_pose) {
  if (qd.kernels.empty()) throw std::invalid_argument("select_manipulator_frame: empty density");
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_rot = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(qd.kernels.size()); ++i) {
    const double d = (qd.kernels[i].pose.p - best_pose.p).norm();
    const double rot = quaternion_distance(qd.kernels[i].pose.q, best_pose.q);
    if (d < best_dist || (d == best_dist && rot < best_rot)) {
      best = i;
      best_dist = d;
      best_rot = rot;
    }
  }
  return qd.kernels[best];
}

const LibraryEntry* ModelLibrary::find(const std::string& shape_id) const {
  for (const auto& e : entries)
    if (e.shape_id == shape_id) return &e;
  return nullptr;
}

ModelSelection select_model(const ModelLibrary& library,
                            const std::vector<SurfaceFeature>& cloud_features, int n_kernels,
                            WeightingMode mode, const Bandwidths& bw, Rng& rng) {
  if (library.entries.empty()) throw std::invalid_argument("select_model: empty library");
  ModelSelection best;
  double best_h = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(library.entries.size()); ++i) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(i));
    QueryDensity qd = build_query_density(library.entries[i].manipulator.frames, cloud_features,
                                          n_kernels, mode, bw, stream,
                                          library.entries[i].shape_id);
    if (qd.h_r < best_h) {
      best_h = qd.h_r;
      best.entry_index = i;
      best.density = std::move(qd);
    }
  }
  return best;
}

}  // namespace pushcast
