#pragma once

#include <string>
#include <vector>

#include "pushcast/geometry.hpp"
#include "pushcast/rng.hpp"
#include "pushcast/shapes.hpp"

namespace pushcast {

struct PhysicalParams {
  double mass = 0.5;              // kg
  double ground_friction = 0.3;   // object-ground Coulomb coefficient
  double pusher_friction = 0.5;   // pusher-object Coulomb coefficient
};

struct ParameterDistribution {
  enum class Kind { Dirac, Uniform, Gaussian };
  Kind kind = Kind::Dirac;
  double a = 0.0;  // value / lower bound / mean
  double b = 0.0;  // upper bound / std dev

  static ParameterDistribution dirac(double value);
  static ParameterDistribution uniform(double lo, double hi);
  static ParameterDistribution gaussian(double mean, double sd);
  /// Named presets, e.g. "friction_low", "mass_general_table".
  static ParameterDistribution preset(const std::string& name);

  double sample(Rng& rng) const;  // gaussian draws redrawn until positive
  double mean() const;
};

struct ParameterDistributions {
  ParameterDistribution mass = ParameterDistribution::gaussian(0.5, 0.025);
  ParameterDistribution ground_friction = ParameterDistribution::uniform(0.085, 0.805);
  ParameterDistribution pusher_friction = ParameterDistribution::dirac(0.5);
};

PhysicalParams sample_params(const ParameterDistributions& dists, Rng& rng);

struct Action {
  int id = 0;
  double linear_velocity = 0.1;       // commanded forward velocity, m/s
  double angular_velocity_deg = 0.0;  // commanded yaw rate, deg/s
  double duration = 4.0;              // s
  double speed = 0.1;                 // target speed, m/s
};

std::vector<Action> make_actions(int count, double angle_min_deg, double angle_max_deg,
                                 double duration, double speed);

struct BumperSpec {
  double width = 0.4;
  double depth = 0.05;
  double height = 0.1;
};

struct SimParams {
  double dt = 0.01;
  int support_points = 16;
  double load_force = 2.5;     // pusher speed droops as 1/(1 + F_req/load_force)
  double gravity = 9.81;
  double ke_threshold = 0.05;  // quasi-static kinetic-energy bound, joules
};

struct PushEpisode {
  std::vector<double> times;
  std::vector<Posed> object_traj;
  std::vector<Posed> pusher_traj;
  Posed final_pose;
  bool contact_made = false;
  bool contact_lost = false;
  bool tipped = false;
  double max_kinetic_energy = 0.0;
};

/// Ground plane at z = 0, object at rest, flat bumper as the pushing link.
struct SimWorld {
  ShapeSpec object_spec;
  TriMesh object_mesh;
  Posed object_rest_pose;
  BumperSpec bumper;
  TriMesh bumper_mesh;
  Posed training_link_pose;  // bumper face touching the object's -x extreme

  // Support model, object frame.
  std::vector<Eigen::Vector2d> footprint;       // convex hull of the resting face
  std::vector<Eigen::Vector2d> support_points;  // Coulomb support sample points
  Eigen::Vector2d com_xy{Eigen::Vector2d::Zero()};
  double rho = 0.0;      // mean support distance from COM: torque/force scale
  double rho_gyr2 = 0.0; // mean squared support distance, for the KE check
};

SimWorld make_world(const ShapeSpec& object, const BumperSpec& bumper,
                    const SimParams& params = {});

/// Quasi-static planar push: support-point Coulomb friction mapped through an
/// ellipsoidal limit surface, sticking/sliding resolution at the bumper face,
/// commanded speed drooping with the required push force. Deterministic; the
/// rng parameter is reserved for sensor-style noise and is not consumed.
PushEpisode simulate_push(const SimWorld& world, const Posed& initial_pose,
                          const PhysicalParams& params, const Posed& pusher_start,
                          const Action& action, const SimParams& sim, Rng& rng);

}  // namespace pushcast
