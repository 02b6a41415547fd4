#include "pushcast/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pushcast {

namespace {

int weighted_draw(const std::vector<double>& weights, Rng& rng) {
  double total = 0;
  for (double w : weights) total += std::max(0.0, w);
  if (total <= 0) return static_cast<int>(rng.uniform_index(weights.size()));
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= std::max(0.0, weights[i]);
    if (u <= 0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<int> sample_without_replacement(int pool, int n, Rng& rng) {
  std::vector<int> idx(pool);
  std::iota(idx.begin(), idx.end(), 0);
  n = std::min(n, pool);
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(pool - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

}  // namespace

PushDataRecord record_push(const PushEpisode& episode, const std::vector<ContactFrame>& frames,
                           int action_id, const PhysicalParams& params) {
  if (episode.tipped || episode.object_traj.empty())
    throw std::runtime_error("record_push: episode unusable");
  const Posed& b0 = episode.object_traj.front();
  const Posed& bf = episode.final_pose;
  const Posed world_motion = compose(bf, inverse(b0));

  PushDataRecord pdr;
  pdr.action_id = action_id;
  pdr.params = params;
  pdr.frames = frames;
  pdr.local_motions.reserve(frames.size());
  for (const auto& f : frames)
    pdr.local_motions.push_back(compose(compose(inverse(f.v), world_motion), f.v));
  pdr.global_motion = compose(inverse(b0), bf);
  return pdr;
}

MotionTrainResult train_motion_model(const ManipulatorContactModel& contact_model,
                                     const std::vector<SurfaceFeature>& features,
                                     const SimWorld& world, const std::vector<Action>& actions,
                                     int samples_per_action, const ParameterDistributions& dists,
                                     int env_contacts_per_push, const Bandwidths& bw,
                                     const SimParams& sim, Rng& rng) {
  if (actions.empty()) throw std::invalid_argument("train_motion_model: no actions");
  if (samples_per_action < 1)
    throw std::invalid_argument("train_motion_model: samples_per_action must be >= 1");

  std::vector<double> contact_weights;
  contact_weights.reserve(contact_model.frames.size());
  for (const auto& f : contact_model.frames) contact_weights.push_back(f.w);

  MotionTrainResult out;
  out.motion.actions = actions;
  out.motion.sigma = bw;
  for (const auto& action : actions) {
    for (int s = 0; s < samples_per_action; ++s) {
      Rng push_rng = rng.fork((static_cast<std::uint64_t>(action.id) << 32) | s);
      const PhysicalParams params = sample_params(dists, push_rng);
      const ContactFrame& manip =
          contact_model.frames[weighted_draw(contact_weights, push_rng)];
      std::vector<ContactFrame> frames;
      frames.push_back(manip);
      const auto env = sample_environment_contacts(features, world.object_rest_pose,
                                                   env_contacts_per_push, push_rng);
      frames.insert(frames.end(), env.begin(), env.end());

      const PushEpisode episode =
          simulate_push(world, world.object_rest_pose, params, world.training_link_pose,
                        action, sim, push_rng);
      if (!episode.contact_made || episode.tipped) {
        ++out.skipped_pushes;
        continue;
      }
      out.motion.records.push_back(record_push(episode, frames, action.id, params));
      for (const auto& f : env) out.environment.frames.push_back(f);
    }
  }
  if (out.motion.records.empty())
    throw std::runtime_error("train_motion_model: every push failed");
  return out;
}

namespace {

struct Expert {
  PoseKernelMix mix;  // kernel motions in the frame's local coordinates
  Posed h;            // frame relation to the estimated pose
  Posed h_inv;
  double exponent = 1.0;
};

double expert_value(const Expert& e, const Posed& body_motion, const TruncationConfig& trunc,
                    FailureStats* stats) {
  const Posed local = compose(compose(e.h, body_motion), e.h_inv);
  return e.mix.eval(local, trunc, stats);
}

}  // namespace

Prediction predict(const MotionModel& model, int action_id,
                   const std::vector<ContactFrame>& placed_frames,
                   const Posed& initial_pose_estimate, const PredictConfig& config,
                   const Bandwidths& bw, const TruncationConfig& trunc0, Rng& rng) {
  if (placed_frames.empty()) throw std::invalid_argument("predict: no placed frames");

  // Kernel pools from the action's records, split by frame kind.
  struct Pair {
    const ContactFrame* frame;
    const Posed* motion;
  };
  std::vector<Pair> manip_pool, env_pool;
  for (const auto& rec : model.records) {
    if (rec.action_id != action_id) continue;
    for (std::size_t i = 0; i < rec.frames.size(); ++i) {
      const Pair pair{&rec.frames[i], &rec.local_motions[i]};
      (rec.frames[i].kind == FrameKind::Manipulator ? manip_pool : env_pool).push_back(pair);
    }
  }
  if (manip_pool.empty() && env_pool.empty())
    throw std::invalid_argument("predict: no records for this action");

  Prediction result;
  int rounds = 0;
  std::vector<Expert> experts;
  std::vector<WeightedPose> seeds;
  const double exponent_manip =
      static_cast<double>(std::min<std::size_t>(config.env_kernels, env_pool.size())) /
      std::max(1.0,
               static_cast<double>(std::min<std::size_t>(config.manip_kernels, manip_pool.size())));

  try {
    for (std::size_t fi = 0; fi < placed_frames.size(); ++fi) {
      const ContactFrame& placed = placed_frames[fi];
      const bool is_manip = placed.kind == FrameKind::Manipulator;
      const auto& pool = is_manip ? manip_pool : env_pool;
      if (pool.empty()) continue;
      const int budget = is_manip ? config.manip_kernels : config.env_kernels;

      Rng pick_rng = rng.fork(0x6b65726e00ull + fi);
      const std::vector<int> chosen =
          sample_without_replacement(static_cast<int>(pool.size()), budget, pick_rng);

      std::vector<ContactKernel> contact_kernels(chosen.size());
      for (std::size_t k = 0; k < chosen.size(); ++k)
        contact_kernels[k] = {pool[chosen[k]].frame->r, pool[chosen[k]].frame->u,
                              1.0 / static_cast<double>(chosen.size())};
      const ContactKernelMix cmix = ContactKernelMix::from_kernels(contact_kernels, bw);

      // Contact-similarity responsibilities; a frame that matches nothing
      // rescales its own bandwidths until something responds.
      TruncationConfig trunc = trunc0;
      Eigen::VectorXd resp;
      for (;;) {
        FailureStats stats;
        resp = cmix.responsibilities(placed.r, placed.u, trunc, &stats);
        if (resp.sum() > 0) break;
        trunc = rescale_on_failure(trunc, stats);
      }
      rounds = std::max(rounds, trunc.rounds() - trunc0.rounds());
      resp /= resp.sum();

      Expert e;
      e.h = compose(inverse(placed.v), initial_pose_estimate);
      e.h_inv = inverse(e.h);
      e.exponent = is_manip ? exponent_manip : 1.0;
      e.mix.sigma_p = bw.sigma_pm;
      e.mix.sigma_q = bw.sigma_qm;
      e.mix.P.resize(3, static_cast<int>(chosen.size()));
      e.mix.Q.resize(4, static_cast<int>(chosen.size()));
      e.mix.w.resize(static_cast<int>(chosen.size()));
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        const Posed& m = *pool[chosen[k]].motion;
        e.mix.P.col(static_cast<int>(k)) = m.p;
        e.mix.Q.col(static_cast<int>(k)) = m.q.coeffs();
        e.mix.w(static_cast<int>(k)) = resp(static_cast<int>(k));
        // Seeds: kernel motions conjugated into the shared body-motion space.
        seeds.push_back({compose(compose(e.h_inv, m), e.h), resp(static_cast<int>(k))});
      }
      experts.push_back(std::move(e));
    }
    if (experts.empty()) throw std::invalid_argument("predict: no usable experts");

    TruncationConfig trunc = trunc0;
    const auto log_score = [&](const Posed& motion, FailureStats* stats) {
      double sum = 0;
      for (const auto& e : experts) {
        const double v = expert_value(e, motion, trunc, stats);
        if (v <= 0) return -std::numeric_limits<double>::infinity();
        sum += e.exponent * std::log(v);
      }
      return sum;
    };

    // Trial rounds: if the product vetoes every seed, widen the bandwidths.
    for (;;) {
      FailureStats stats;
      bool any = false;
      for (const auto& s : seeds) {
        if (std::isfinite(log_score(s.pose, &stats))) {
          any = true;
          break;
        }
      }
      if (any) break;
      trunc = rescale_on_failure(trunc, stats);
      rounds = std::max(rounds, trunc.rounds() - trunc0.rounds());
    }

    const auto score = [&](const Posed& motion) { return log_score(motion, nullptr); };
    const AnnealResult best = anneal(score, seeds, config.anneal, rng);
    result.global_motion = best.pose;
    result.final_pose = compose(initial_pose_estimate, best.pose);
    result.log_likelihood = best.score;
    result.rounds_used = rounds;
  } catch (const RescaleCapExceeded&) {
    result.failed = true;
    result.final_pose = initial_pose_estimate;
    result.global_motion = Posed::identity();
    result.rounds_used = rounds;
  }
  return result;
}

}  // namespace pushcast
