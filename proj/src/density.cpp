#include "pushcast/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace pushcast {

TruncationConfig rescale_on_failure(const TruncationConfig& trunc, const FailureStats& stats) {
  if (trunc.rounds() >= trunc.max_rounds) {
    std::ostringstream os;
    os << "bandwidth rescaling cap exceeded after " << trunc.rounds()
       << " rounds (T = " << trunc.t_p << "," << trunc.t_q << "," << trunc.t_r
       << "; zero counts p=" << stats.zero_p << " q=" << stats.zero_q
       << " r=" << stats.zero_r << ")";
    throw RescaleCapExceeded(os.str());
  }
  TruncationConfig out = trunc;
  const int tmin = std::min({trunc.t_p, trunc.t_q, trunc.t_r});
  long best_zeros = -1;
  int pick = 0;  // 0=p 1=q 2=r
  const int ts[3] = {trunc.t_p, trunc.t_q, trunc.t_r};
  const long zs[3] = {stats.zero_p, stats.zero_q, stats.zero_r};
  for (int c = 0; c < 3; ++c) {
    if (ts[c] != tmin) continue;
    if (zs[c] > best_zeros) {
      best_zeros = zs[c];
      pick = c;
    }
  }
  if (pick == 0) ++out.t_p;
  if (pick == 1) ++out.t_q;
  if (pick == 2) ++out.t_r;
  return out;
}

double eval_gauss3(const Eigen::Vector3d& p, const Eigen::Vector3d& mu, double sigma,
                   const TruncationConfig& trunc) {
  const double d = trunc.beta_p() * dist_p(p, mu, sigma);
  return d >= trunc.delta_p ? 0.0 : std::exp(-d);
}

double eval_vmf(const Eigen::Quaterniond& q, const Eigen::Quaterniond& mu, double sigma,
                const TruncationConfig& trunc) {
  const double d = trunc.beta_q() * dist_q(q, mu, sigma);
  return d >= trunc.delta_q ? 0.0 : std::exp(-d);
}

double eval_gauss2(const Descriptord& r, const Descriptord& mu, const Descriptord& sigma,
                   const TruncationConfig& trunc) {
  const double d = trunc.beta_r() * dist_r(r, mu, sigma);
  return d >= trunc.delta_r ? 0.0 : std::exp(-d);
}

double eval_feature_density(std::span<const FeatureKernel> kernels, const SurfaceFeature& x,
                            const Bandwidths& bw, const TruncationConfig& trunc,
                            FailureStats* stats) {
  double sum = 0;
  for (const auto& k : kernels) {
    const double gp = eval_gauss3(x.v.p, k.mu.v.p, bw.sigma_p, trunc);
    const double gq = eval_vmf(x.v.q, k.mu.v.q, bw.sigma_q, trunc);
    const double gr = eval_gauss2(x.r, k.mu.r, bw.sigma_r, trunc);
    if (stats) {
      if (gp == 0) ++stats->zero_p;
      if (gq == 0) ++stats->zero_q;
      if (gr == 0) ++stats->zero_r;
    }
    sum += k.weight * gp * gq * gr;
  }
  return sum;
}

double eval_contact_density(std::span<const ContactKernel> kernels, const Descriptord& r,
                            const Posed& u, const Bandwidths& bw, const TruncationConfig& trunc,
                            FailureStats* stats) {
  double sum = 0;
  for (const auto& k : kernels) {
    const double gp = eval_gauss3(u.p, k.mu_u.p, bw.sigma_p, trunc);
    const double gq = eval_vmf(u.q, k.mu_u.q, bw.sigma_q, trunc);
    const double gr = eval_gauss2(r, k.mu_r, bw.sigma_r, trunc);
    if (stats) {
      if (gp == 0) ++stats->zero_p;
      if (gq == 0) ++stats->zero_q;
      if (gr == 0) ++stats->zero_r;
    }
    sum += k.weight * gp * gq * gr;
  }
  return sum;
}

double eval_motion_density(std::span<const MotionKernel> kernels, const Descriptord& r,
                           const Posed& u, const Posed& m, const Bandwidths& bw,
                           const TruncationConfig& trunc) {
  double numerator = 0;
  double marginal = 0;
  for (const auto& k : kernels) {
    const double kc = k.contact.weight *
                      eval_gauss3(u.p, k.contact.mu_u.p, bw.sigma_p, trunc) *
                      eval_vmf(u.q, k.contact.mu_u.q, bw.sigma_q, trunc) *
                      eval_gauss2(r, k.contact.mu_r, bw.sigma_r, trunc);
    marginal += kc;
    numerator += kc * eval_gauss3(m.p, k.mu_m.p, bw.sigma_pm, trunc) *
                 eval_vmf(m.q, k.mu_m.q, bw.sigma_qm, trunc);
  }
  if (marginal <= 0)
    throw std::runtime_error("eval_motion_density: conditional undefined, P(c) = 0");
  return numerator / marginal;
}

double PoseKernelMix::eval(const Posed& pose, const TruncationConfig& trunc,
                           FailureStats* stats) const {
  const double bp = trunc.beta_p(), bq = trunc.beta_q();
  const Eigen::ArrayXd dp =
      (P.colwise() - pose.p).colwise().squaredNorm().transpose().array() / sigma_p;
  const Eigen::ArrayXd dq =
      (1.0 - (Q.transpose() * pose.q.coeffs()).array().abs()) / sigma_q;
  double sum = 0;
  for (int i = 0; i < w.size(); ++i) {
    const double sp = bp * dp(i), sq = bq * dq(i);
    const bool cut_p = sp >= trunc.delta_p, cut_q = sq >= trunc.delta_q;
    if (stats) {
      if (cut_p) ++stats->zero_p;
      if (cut_q) ++stats->zero_q;
    }
    if (!cut_p && !cut_q) sum += w(i) * std::exp(-sp - sq);
  }
  return sum;
}

ContactKernelMix ContactKernelMix::from_kernels(std::span<const ContactKernel> kernels,
                                                const Bandwidths& bw) {
  ContactKernelMix mix;
  const int n = static_cast<int>(kernels.size());
  mix.Up.resize(3, n);
  mix.Uq.resize(4, n);
  mix.R.resize(2, n);
  mix.w.resize(n);
  for (int i = 0; i < n; ++i) {
    mix.Up.col(i) = kernels[i].mu_u.p;
    mix.Uq.col(i) = kernels[i].mu_u.q.coeffs();
    mix.R.col(i) = kernels[i].mu_r;
    mix.w(i) = kernels[i].weight;
  }
  mix.sigma_p = bw.sigma_p;
  mix.sigma_q = bw.sigma_q;
  mix.sigma_r = bw.sigma_r;
  return mix;
}

Eigen::VectorXd ContactKernelMix::responsibilities(const Descriptord& r, const Posed& u,
                                                   const TruncationConfig& trunc,
                                                   FailureStats* stats) const {
  const double bp = trunc.beta_p(), bq = trunc.beta_q(), br = trunc.beta_r();
  const Eigen::ArrayXd dp =
      (Up.colwise() - u.p).colwise().squaredNorm().transpose().array() / sigma_p;
  const Eigen::ArrayXd dq = (1.0 - (Uq.transpose() * u.q.coeffs()).array().abs()) / sigma_q;
  const Eigen::Matrix2Xd rd = R.colwise() - r;
  const Eigen::ArrayXd dr = (rd.row(0).array().square() / sigma_r(0) +
                             rd.row(1).array().square() / sigma_r(1))
                                .transpose();
  Eigen::VectorXd out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double sp = bp * dp(i), sq = bq * dq(i), sr = br * dr(i);
    const bool cp = sp >= trunc.delta_p, cq = sq >= trunc.delta_q, cr = sr >= trunc.delta_r;
    if (stats) {
      if (cp) ++stats->zero_p;
      if (cq) ++stats->zero_q;
      if (cr) ++stats->zero_r;
    }
    out(i) = (cp || cq || cr) ? 0.0 : w(i) * std::exp(-sp - sq - sr);
  }
  return out;
}

double ContactKernelMix::eval(const Descriptord& r, const Posed& u,
                              const TruncationConfig& trunc, FailureStats* stats) const {
  return responsibilities(r, u, trunc, stats).sum();
}

namespace {

struct ChainResult {
  Posed pose;
  double score = -std::numeric_limits<double>::infinity();
};

// Deterministic coordinate descent from the incumbent: shrinking steps along
// the translation axes and rotation, accepting only improvements. Sharpens
// the annealed optimum on flat-topped scores without touching the rng.
void polish(const std::function<double(const Posed&)>& score, Posed& pose, double& best,
            double trans_scale, double rot_scale, bool planar) {
  const double scales[] = {0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
  const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()};
  for (const double s : scales) {
    const double ts = trans_scale * s, rs = rot_scale * s;
    for (int sweep = 0; sweep < 4; ++sweep) {
      bool improved = false;
      const int n_axes = planar ? 2 : 3;
      for (int a = 0; a < n_axes; ++a) {
        for (const double sign : {1.0, -1.0}) {
          Posed cand = pose;
          cand.p += sign * ts * axes[a];
          const double sc = score(cand);
          if (sc > best) {
            best = sc;
            pose = cand;
            improved = true;
          }
        }
      }
      const int n_rot = planar ? 1 : 3;
      for (int a = 0; a < n_rot; ++a) {
        const Eigen::Vector3d& axis = planar ? axes[2] : axes[a];
        for (const double sign : {1.0, -1.0}) {
          Posed cand = pose;
          cand.q = (Eigen::Quaterniond(Eigen::AngleAxisd(sign * rs, axis)) * pose.q).normalized();
          const double sc = score(cand);
          if (sc > best) {
            best = sc;
            pose = cand;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }
}

Posed propose(const Posed& pose, double trans_std, double rot_std, bool planar, Rng& rng) {
  Posed out = pose;
  out.p.x() += rng.normal(0, trans_std);
  out.p.y() += rng.normal(0, trans_std);
  if (planar) {
    out.q = (Eigen::Quaterniond(Eigen::AngleAxisd(rng.normal(0, rot_std),
                                                  Eigen::Vector3d::UnitZ())) *
             pose.q)
                .normalized();
  } else {
    out.p.z() += rng.normal(0, trans_std);
    Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
    if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
    out.q = (Eigen::Quaterniond(Eigen::AngleAxisd(rng.normal(0, rot_std), axis.normalized())) *
             pose.q)
                .normalized();
  }
  return out;
}

}  // namespace

AnnealResult anneal(const std::function<double(const Posed&)>& score,
                    const std::vector<WeightedPose>& seeds, const AnnealConfig& config,
                    Rng& rng) {
  if (seeds.empty()) throw std::invalid_argument("anneal: no seeds");
  if (config.candidates < 1 || config.steps < 1)
    throw std::invalid_argument("anneal: candidates and steps must be >= 1");

  // Score every seed: the incumbent can never fall below the best of them.
  double best_seed_score = -std::numeric_limits<double>::infinity();
  double worst_seed_score = std::numeric_limits<double>::infinity();
  int best_seed = 0;
  std::vector<double> seed_scores(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    seed_scores[i] = score(seeds[i].pose);
    if (seed_scores[i] > best_seed_score) {
      best_seed_score = seed_scores[i];
      best_seed = static_cast<int>(i);
    }
    worst_seed_score = std::min(worst_seed_score, seed_scores[i]);
  }
  const double accept_scale =
      std::max(best_seed_score - worst_seed_score, std::max(std::abs(best_seed_score) * 0.1, 1e-12));

  std::vector<double> cumulative(seeds.size());
  double total = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    total += std::max(0.0, seeds[i].weight);
    cumulative[i] = total;
  }

  const std::uint64_t salt = rng.next_u64();
  const Rng base = rng.fork(salt);
  std::vector<ChainResult> chains(config.candidates);
  const double decay = config.steps > 1
                           ? std::pow(config.temp_end / config.temp_start,
                                      1.0 / static_cast<double>(config.steps - 1))
                           : 1.0;

  auto run_chain = [&](int c) {
    Rng r = base.fork(static_cast<std::uint64_t>(c));
    std::size_t pick = 0;
    if (total > 0) {
      const double u = r.uniform() * total;
      pick = static_cast<std::size_t>(
          std::distance(cumulative.begin(),
                        std::lower_bound(cumulative.begin(), cumulative.end(), u)));
      pick = std::min(pick, seeds.size() - 1);
    } else {
      pick = r.uniform_index(seeds.size());
    }
    Posed current = seeds[pick].pose;
    double current_score = seed_scores[pick];
    ChainResult best{current, current_score};
    double temp = config.temp_start;
    for (int s = 0; s < config.steps; ++s, temp *= decay) {
      const Posed cand =
          propose(current, config.trans_std * temp, config.rot_std * temp, config.planar, r);
      const double cand_score = score(cand);
      bool accept = cand_score >= current_score;
      if (!accept) {
        const double p = std::exp((cand_score - current_score) / (temp * accept_scale));
        accept = r.uniform() < p;
      }
      if (accept) {
        current = cand;
        current_score = cand_score;
        if (cand_score > best.score) best = {cand, cand_score};
      }
    }
    chains[c] = best;
  };

  if (config.jobs > 1) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(config.jobs, config.candidates);
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < config.candidates; c = next.fetch_add(1))
          run_chain(c);
      });
    }
    for (auto& t : pool) t.join();
  } else {
    for (int c = 0; c < config.candidates; ++c) run_chain(c);
  }

  AnnealResult result{seeds[best_seed].pose, best_seed_score};
  for (const auto& chain : chains) {
    if (chain.score > result.score) {
      result.pose = chain.pose;
      result.score = chain.score;
    }
  }
  polish(score, result.pose, result.score, config.trans_std, config.rot_std, config.planar);
  return result;
}

}  // namespace pushcast
