#include "pushcast/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pushcast {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double radical_inverse2(unsigned i) {
  double f = 0.5, v = 0.0;
  for (; i; i >>= 1, f *= 0.5)
    if (i & 1) v += f;
  return v;
}

Eigen::Vector2d rot2(double yaw, const Eigen::Vector2d& v) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double yaw_of(const Eigen::Quaterniond& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

Posed planar_pose(const Eigen::Vector2d& xy, double z, double yaw) {
  return Posed(Eigen::Vector3d(xy.x(), xy.y(), z),
               Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())));
}

}  // namespace

ParameterDistribution ParameterDistribution::dirac(double value) {
  return {Kind::Dirac, value, 0.0};
}

ParameterDistribution ParameterDistribution::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform distribution requires a < b");
  return {Kind::Uniform, lo, hi};
}

ParameterDistribution ParameterDistribution::gaussian(double mean, double sd) {
  if (!(sd > 0)) throw std::invalid_argument("gaussian distribution requires sd > 0");
  return {Kind::Gaussian, mean, sd};
}

ParameterDistribution ParameterDistribution::preset(const std::string& name) {
  if (name == "friction_general") return uniform(0.085, 0.805);
  if (name == "friction_low") return gaussian(0.1, 0.005);
  if (name == "friction_medium") return gaussian(0.4, 0.02);
  if (name == "friction_high") return gaussian(0.7, 0.035);
  // The prose and the parameter table disagree on the general mass range;
  // both readings are exposed and the table value is the default.
  if (name == "mass_general_table") return uniform(0.085, 5.75);
  if (name == "mass_general_text") return uniform(0.85, 5.75);
  if (name == "mass_low") return gaussian(0.1, 0.005);
  if (name == "mass_medium") return gaussian(1.0, 0.05);
  if (name == "mass_high") return gaussian(5.0, 0.25);
  if (name == "ground_friction_default") return gaussian(0.3, 0.05);
  throw std::invalid_argument("unknown distribution preset: " + name);
}

double ParameterDistribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Dirac:
      return a;
    case Kind::Uniform:
      return rng.uniform(a, b);
    case Kind::Gaussian:
      for (int attempt = 0; attempt < 100; ++attempt) {
        const double v = rng.normal(a, b);
        if (v > 0) return v;
      }
      throw std::runtime_error("gaussian parameter draw stayed non-positive after 100 attempts");
  }
  throw std::logic_error("unreachable");
}

double ParameterDistribution::mean() const {
  switch (kind) {
    case Kind::Dirac: return a;
    case Kind::Uniform: return (a + b) / 2;
    case Kind::Gaussian: return a;
  }
  throw std::logic_error("unreachable");
}

PhysicalParams sample_params(const ParameterDistributions& dists, Rng& rng) {
  PhysicalParams p;
  p.mass = dists.mass.sample(rng);
  p.ground_friction = dists.ground_friction.sample(rng);
  p.pusher_friction = dists.pusher_friction.sample(rng);
  return p;
}

std::vector<Action> make_actions(int count, double angle_min_deg, double angle_max_deg,
                                 double duration, double speed) {
  if (count < 1) throw std::invalid_argument("need at least one action");
  std::vector<Action> actions(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    actions[i] = {i, speed, angle_min_deg + t * (angle_max_deg - angle_min_deg), duration, speed};
  }
  return actions;
}

SimWorld make_world(const ShapeSpec& object, const BumperSpec& bumper, const SimParams& params) {
  SimWorld world;
  world.object_spec = object;
  world.object_mesh = make_mesh(object);
  world.object_rest_pose =
      Posed::translation(0, 0, world.object_mesh.dims.z() / 2);
  world.bumper = bumper;
  world.bumper_mesh = make_mesh(ShapeSpec::box(bumper.depth, bumper.width, bumper.height));

  double obj_xmin = world.object_mesh.vertices.front().x();
  double obj_zmin = world.object_mesh.vertices.front().z();
  for (const auto& v : world.object_mesh.vertices) {
    obj_xmin = std::min(obj_xmin, v.x());
    obj_zmin = std::min(obj_zmin, v.z());
  }
  // Bumper face touching the object's -x extreme, base on the floor.
  world.training_link_pose =
      Posed::translation(obj_xmin - bumper.depth / 2, 0, bumper.height / 2);
  if (world.training_link_pose.p.x() + bumper.depth / 2 > obj_xmin + 1e-12)
    throw std::runtime_error("make_world: initial geometry overlaps");

  // Resting-face footprint and the support model derived from it.
  std::vector<Eigen::Vector2d> base;
  for (const auto& v : world.object_mesh.vertices)
    if (v.z() < obj_zmin + 1e-9) base.emplace_back(v.x(), v.y());
  world.footprint = convex_hull_xy(base);
  if (world.footprint.size() < 3)
    throw std::runtime_error("make_world: degenerate resting footprint");
  world.com_xy = world.object_mesh.volume_centroid().head<2>();

  // k support points spread over the footprint: fan triangles, largest-
  // remainder allocation, bit-reversed barycentric pattern inside each.
  Eigen::Vector2d fc = Eigen::Vector2d::Zero();
  for (const auto& p : world.footprint) fc += p;
  fc /= static_cast<double>(world.footprint.size());
  const int nt = static_cast<int>(world.footprint.size());
  std::vector<double> areas(nt);
  double area_total = 0;
  for (int i = 0; i < nt; ++i) {
    const Eigen::Vector2d a = world.footprint[i] - fc;
    const Eigen::Vector2d b = world.footprint[(i + 1) % nt] - fc;
    areas[i] = std::abs(cross2(a, b)) / 2;
    area_total += areas[i];
  }
  const int k = std::max(3, params.support_points);
  std::vector<int> alloc(nt, 0);
  int allocated = 0;
  std::vector<std::pair<double, int>> remainders(nt);
  for (int i = 0; i < nt; ++i) {
    const double share = k * areas[i] / area_total;
    alloc[i] = static_cast<int>(share);
    allocated += alloc[i];
    remainders[i] = {share - alloc[i], i};
  }
  std::sort(remainders.rbegin(), remainders.rend());
  for (int i = 0; allocated < k; ++i, ++allocated) alloc[remainders[i % nt].second]++;
  for (int i = 0; i < nt; ++i) {
    const Eigen::Vector2d& a = world.footprint[i];
    const Eigen::Vector2d& b = world.footprint[(i + 1) % nt];
    for (int j = 0; j < alloc[i]; ++j) {
      double u = (j + 0.5) / alloc[i];
      double v = radical_inverse2(static_cast<unsigned>(j) + 1);
      if (u + v > 1) {
        u = 1 - u;
        v = 1 - v;
      }
      world.support_points.push_back(fc + u * (a - fc) + v * (b - fc));
    }
  }
  double rho = 0, gyr = 0;
  for (const auto& sp : world.support_points) {
    const double d = (sp - world.com_xy).norm();
    rho += d;
    gyr += d * d;
  }
  world.rho = rho / static_cast<double>(world.support_points.size());
  world.rho_gyr2 = gyr / static_cast<double>(world.support_points.size());
  return world;
}

PushEpisode simulate_push(const SimWorld& world, const Posed& initial_pose,
                          const PhysicalParams& params, const Posed& pusher_start,
                          const Action& action, const SimParams& sim, Rng& rng) {
  (void)rng;
  if (!(sim.dt > 0) || sim.dt > 0.05) throw std::invalid_argument("dt must be in (0, 0.05]");
  if (!(params.mass > 0) || !(params.ground_friction > 0) || !(params.pusher_friction > 0))
    throw std::invalid_argument("physical parameters must be positive");

  Eigen::Vector2d obj_xy = initial_pose.p.head<2>();
  double obj_yaw = yaw_of(initial_pose.q);
  const double obj_z = initial_pose.p.z();
  Eigen::Vector2d push_xy = pusher_start.p.head<2>();
  double push_yaw = yaw_of(pusher_start.q);
  const double push_z = pusher_start.p.z();

  const double omega_cmd = action.angular_velocity_deg * kDegToRad;
  const double speed_cmd = action.linear_velocity;
  const double half_w = world.bumper.width / 2;
  const double face_off = world.bumper.depth / 2;
  const double rho2 = world.rho * world.rho;
  const double f_limit = params.ground_friction * params.mass * sim.gravity;
  const double contact_h = std::min(world.bumper.height, world.object_mesh.dims.z()) / 2;

  PushEpisode ep;
  ep.times.push_back(0);
  ep.object_traj.push_back(planar_pose(obj_xy, obj_z, obj_yaw));
  ep.pusher_traj.push_back(planar_pose(push_xy, push_z, push_yaw));

  const int steps = static_cast<int>(std::llround(action.duration / sim.dt));
  bool contact_now = false;
  for (int step = 0; step < steps; ++step) {
    const Eigen::Vector2d heading(std::cos(push_yaw), std::sin(push_yaw));
    const Eigen::Vector2d lateral(-heading.y(), heading.x());
    const Eigen::Vector2d face = push_xy + face_off * heading;
    const Eigen::Vector2d com = obj_xy + rot2(obj_yaw, world.com_xy);

    // Contact: footprint vertices at or just behind the face plane, inside
    // the face segment laterally. Vertices deeper than the band are not face
    // contacts (the object sits beside or behind the pusher body).
    constexpr double band = 0.01;
    Eigen::Vector2d cp = Eigen::Vector2d::Zero();
    int n_contact = 0;
    for (const auto& fv : world.footprint) {
      const Eigen::Vector2d v = obj_xy + rot2(obj_yaw, fv);
      const double sn = (v - face).dot(heading);
      const double st = (v - face).dot(lateral);
      if (sn <= 1e-7 && sn >= -band && std::abs(st) <= half_w) {
        cp += v;
        ++n_contact;
      }
    }

    double load_factor = 1.0;
    Eigen::Vector2d vel = Eigen::Vector2d::Zero();
    double omega = 0;
    contact_now = n_contact > 0;
    if (contact_now) {
      ep.contact_made = true;
      cp /= static_cast<double>(n_contact);
      const Eigen::Vector2d r = cp - com;
      const Eigen::Vector2d v_push =
          speed_cmd * heading + omega_cmd * Eigen::Vector2d(-(cp - push_xy).y(), (cp - push_xy).x());

      if (v_push.dot(heading) > 1e-12) {
        Eigen::Matrix2d m;
        m << 1 + r.y() * r.y() / rho2, -r.x() * r.y() / rho2,
            -r.x() * r.y() / rho2, 1 + r.x() * r.x() / rho2;
        const Eigen::Vector2d f_stick = m.inverse() * v_push;
        const double fn = f_stick.dot(heading);
        const double ft = f_stick.dot(lateral);

        Eigen::Vector2d f_dir;
        bool moving = true;
        if (fn > 0 && std::abs(ft) <= params.pusher_friction * fn) {
          vel = f_stick;  // sticking: contact point tracks the pusher exactly
          omega = cross2(r, f_stick) / rho2;
          f_dir = f_stick.normalized();
        } else {
          // Sliding: force pinned to the friction cone edge, normal-velocity
          // matching sets the magnitude.
          const double side = ft >= 0 ? 1.0 : -1.0;
          f_dir = (heading + params.pusher_friction * side * lateral).normalized();
          const Eigen::Vector2d v_dir = f_dir;
          const double w_dir = cross2(r, f_dir) / rho2;
          const Eigen::Vector2d v_contact = v_dir + w_dir * Eigen::Vector2d(-r.y(), r.x());
          const double denom = v_contact.dot(heading);
          if (denom > 1e-12) {
            const double scale = v_push.dot(heading) / denom;
            vel = scale * v_dir;
            omega = scale * w_dir;
          } else {
            moving = false;
          }
        }

        if (moving) {
          // Required force magnitude on the limit surface drives the speed
          // droop and the tipping test.
          const double tau_unit = cross2(r, f_dir);
          const double f_req =
              f_limit / std::sqrt(1.0 + tau_unit * tau_unit / rho2);
          load_factor = 1.0 / (1.0 + f_req / sim.load_force);

          double d_front = 0;
          for (const auto& fv : world.footprint) {
            const Eigen::Vector2d v = obj_xy + rot2(obj_yaw, fv);
            d_front = std::max(d_front, (v - com).dot(f_dir));
          }
          if (f_req * contact_h > params.mass * sim.gravity * d_front) {
            ep.tipped = true;
            break;
          }

          const double ke = 0.5 * params.mass * (vel * load_factor).squaredNorm() +
                            0.5 * params.mass * world.rho_gyr2 *
                                (omega * load_factor) * (omega * load_factor);
          ep.max_kinetic_energy = std::max(ep.max_kinetic_energy, ke);
        }
      }
    }

    obj_xy += load_factor * vel * sim.dt;
    obj_yaw += load_factor * omega * sim.dt;
    push_xy += load_factor * speed_cmd * sim.dt * heading;
    push_yaw += load_factor * omega_cmd * sim.dt;

    // Positional projection: resolve any residual overlap along the heading.
    if (contact_now) {
      const Eigen::Vector2d h2(std::cos(push_yaw), std::sin(push_yaw));
      const Eigen::Vector2d l2(-h2.y(), h2.x());
      const Eigen::Vector2d f2 = push_xy + face_off * h2;
      double pen = 0;
      for (const auto& fv : world.footprint) {
        const Eigen::Vector2d v = obj_xy + rot2(obj_yaw, fv);
        const double sn = (v - f2).dot(h2);
        const double st = (v - f2).dot(l2);
        if (std::abs(st) <= half_w && sn >= -band) pen = std::max(pen, -sn);
      }
      if (pen > 0) obj_xy += pen * h2;
    }

    ep.times.push_back((step + 1) * sim.dt);
    ep.object_traj.push_back(planar_pose(obj_xy, obj_z, obj_yaw));
    ep.pusher_traj.push_back(planar_pose(push_xy, push_z, push_yaw));
  }

  ep.contact_lost = ep.contact_made && !contact_now;
  ep.final_pose = ep.object_traj.back();
  return ep;
}

}  // namespace pushcast
