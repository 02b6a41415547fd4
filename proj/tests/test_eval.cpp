#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pushcast/config.hpp"
#include "pushcast/eval.hpp"
#include "pushcast/pipeline.hpp"
#include "pushcast/rng.hpp"

using namespace pushcast;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Quaterniond rot(const Eigen::Vector3d& axis, double angle) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized()));
}

RunConfig smoke_config() {
  RunConfig c;
  c.cloud_density = 9000;
  c.samples_per_action = 8;
  c.env_train_contacts = 4;
  c.env_predict_contacts = 3;
  c.env_predict_samples = 30;
  c.pose_kernels = 400;
  c.contact_kernels = 120;
  c.predict_env_kernels = 60;
  c.predict_manip_kernels = 12;
  c.pose_anneal.candidates = 60;
  c.pose_anneal.steps = 25;
  c.motion_anneal.candidates = 60;
  c.motion_anneal.steps = 25;
  c.n_conditions = 2;
  c.pose_runs = 3;
  c.biasing_conditions = 2;
  c.jobs = 2;
  return c;
}

}  // namespace

TEST_CASE("H_acc: exact match, the 4 cm case, symmetry forgiveness") {
  const ShapeSpec cube = ShapeSpec::cube(0.2);
  const SymmetrySet sym = symmetry_set(cube);
  const Posed truth(Eigen::Vector3d(0.3, -0.2, 0.1), rot({0, 0, 1}, 0.7));

  CHECK(accuracy(truth, truth, cube.dimensions, sym) == doctest::Approx(0.0));

  Posed off = truth;
  off.p.x() += 0.04;
  CHECK(accuracy(off, truth, cube.dimensions, sym) == doctest::Approx(0.2));

  // Any of the 24 cube rotations of the ground truth is free.
  for (const auto& s : sym.rotations) {
    Posed ghost = truth;
    ghost.q = truth.q * s;
    CHECK(accuracy(ghost, truth, cube.dimensions, sym) == doctest::Approx(0.0).epsilon(1e-12));
  }

  // A rotation outside the symmetry set costs its quaternion distance.
  Posed bad = truth;
  bad.q = truth.q * rot({0, 0, 1}, kPi / 4);
  const double expected = 1.0 - std::pow(std::cos(kPi / 8), 2);
  CHECK(accuracy(bad, truth, cube.dimensions, sym) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("H_acc linear term scales inversely with the dims") {
  const SymmetrySet none;  // identity only
  const Posed truth = Posed::identity();
  Posed off = truth;
  off.p = Eigen::Vector3d(0.03, 0.01, -0.02);
  const double small = accuracy(off, truth, Eigen::Vector3d::Constant(0.2), none);
  const double large = accuracy(off, truth, Eigen::Vector3d::Constant(0.4), none);
  CHECK(small == doctest::Approx(2 * large).epsilon(1e-12));
  CHECK_THROWS_AS(accuracy(off, truth, Eigen::Vector3d(0.2, 0, 0.2), none),
                  std::invalid_argument);
}

TEST_CASE("symmetry sets: cardinalities and closure") {
  CHECK(symmetry_set(ShapeSpec::cube(0.2)).rotations.size() == 24);
  CHECK(symmetry_set(ShapeSpec::box(0.1, 0.2, 0.3)).rotations.size() == 4);
  CHECK(symmetry_set(ShapeSpec::box(0.2, 0.2, 0.3)).rotations.size() == 8);
  CHECK(symmetry_set(ShapeSpec::box(0.2, 0.3, 0.2)).rotations.size() == 8);
  CHECK(symmetry_set(ShapeSpec::box(0.3, 0.2, 0.2)).rotations.size() == 8);
  CHECK(symmetry_set(ShapeSpec::box(0.2, 0.2, 0.2)).rotations.size() == 24);
  CHECK(symmetry_set(ShapeSpec::hybrid(0.2)).rotations.size() == 2);
  CHECK(symmetry_set(ShapeSpec::notched_cube(0.2)).rotations.size() == 3);

  for (const auto& spec :
       {ShapeSpec::cube(0.2), ShapeSpec::box(0.1, 0.2, 0.3), ShapeSpec::box(0.2, 0.2, 0.3),
        ShapeSpec::hybrid(0.2), ShapeSpec::notched_cube(0.2)}) {
    const SymmetrySet sym = symmetry_set(spec);
    bool has_identity = false;
    for (const auto& q : sym.rotations)
      if (quaternion_distance(q, Eigen::Quaterniond::Identity()) < 1e-12) has_identity = true;
    CHECK(has_identity);
    // Closure: every pairwise product is in the set (up to sign).
    for (const auto& a : sym.rotations) {
      for (const auto& b : sym.rotations) {
        const Eigen::Quaterniond ab = a * b;
        bool found = false;
        for (const auto& c : sym.rotations)
          if (quaternion_distance(ab, c) < 1e-9) found = true;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("symmetry rotations map their meshes onto themselves") {
  for (const auto& spec : {ShapeSpec::cube(0.2), ShapeSpec::notched_cube(0.2)}) {
    const TriMesh mesh = make_mesh(spec);
    // Rotate about the bounding-box centre: the notched cube's symmetry axis
    // passes through the parent cube centre, not the volume centroid.
    Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
    for (const auto& v : mesh.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    const Eigen::Vector3d center = (lo + hi) / 2;
    for (const auto& s : symmetry_set(spec).rotations) {
      for (const auto& v : mesh.vertices) {
        const Eigen::Vector3d moved = s * (v - center) + center;
        double nearest = 1e18;
        for (const auto& w : mesh.vertices) nearest = std::min(nearest, (moved - w).norm());
        CHECK(nearest < 1e-9);
      }
    }
  }
}

TEST_CASE("cylinder symmetry: closed form equals a dense numeric oracle") {
  const ShapeSpec cyl = ShapeSpec::cylinder(0.2, 0.1);
  const SymmetrySet sym = symmetry_set(cyl);
  CHECK(sym.continuous_z);
  CHECK(sym.z_flip);

  // Any pure yaw of the ground truth costs nothing.
  const Posed truth(Eigen::Vector3d(0.1, 0.2, 0.1), rot({0, 0, 1}, 0.3));
  for (double yaw : {0.0, 0.4, 1.9, -2.5}) {
    Posed ghost = truth;
    ghost.q = truth.q * rot({0, 0, 1}, yaw);
    CHECK(accuracy(ghost, truth, cyl.dimensions, sym) == doctest::Approx(0.0).epsilon(1e-12));
  }

  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Quaterniond qe(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    Eigen::Quaterniond qgt(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    qe.normalize();
    qgt.normalize();
    const Posed pe(Eigen::Vector3d::Zero(), qe), pg(Eigen::Vector3d::Zero(), qgt);
    const double closed = accuracy(pe, pg, cyl.dimensions, sym);

    double numeric = 1e18;
    for (int flip = 0; flip < 2; ++flip) {
      for (int k = 0; k < 3600; ++k) {
        Eigen::Quaterniond s = rot({0, 0, 1}, 2 * kPi * k / 3600);
        if (flip) s = rot({1, 0, 0}, kPi) * s;
        const double dot = qe.coeffs().dot((qgt * s).coeffs());
        numeric = std::min(numeric, 1.0 - dot * dot);
      }
    }
    CHECK(closed == doctest::Approx(numeric).epsilon(1e-5));
  }
}

TEST_CASE("centroid baseline behavior") {
  // Symmetric full cloud of a centred cube: the centroid hits the centre.
  const TriMesh mesh = make_mesh(ShapeSpec::cube(0.2));
  const Posed pose = Posed::translation(0.3, -0.1, 0.1);
  TriMesh world = mesh;
  for (auto& v : world.vertices) v = pose.apply(v);
  const PointCloud full = sample_full_cloud(world, 20000, 3);
  const Posed est = centroid_baseline(full);
  CHECK((est.p - pose.p).norm() < 0.005);
  CHECK(quaternion_distance(est.q, Eigen::Quaterniond::Identity()) == doctest::Approx(0.0));

  // Single-view partial cloud: biased toward the visible faces.
  const PointCloud partial =
      sample_partial_cloud(mesh, pose, Eigen::Vector3d(1.5, 1.0, 1.0), 20000, 4);
  const Posed biased = centroid_baseline(partial);
  CHECK((biased.p - pose.p).norm() > 0.02);
  CHECK(quaternion_distance(biased.q, Eigen::Quaterniond::Identity()) == doctest::Approx(0.0));

  PointCloud empty;
  CHECK_THROWS_AS(centroid_baseline(empty), std::invalid_argument);
}

TEST_CASE("report cells: means and stds consistent with the rows") {
  AccuracyReport report;
  report.add({"a", "cube", 0, 0.2, 0.01, 0.1});
  report.add({"a", "cube", 1, 0.4, 0.03, 0.2});
  report.add({"a", "cyl", 2, 1.0, 0.05, 0.3});
  report.add({"b", "cube", 3, 0.6, 0.02, 0.1});
  const CellStats cell = report.cell("a", "cube");
  CHECK(cell.count == 2);
  CHECK(cell.mean_h_acc == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(cell.std_h_acc == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(cell.mean_linear_error == doctest::Approx(0.02).epsilon(1e-12));
  const CellStats all_a = report.cell("a");
  CHECK(all_a.count == 3);
  CHECK(report.cells().size() == 3);
}

TEST_CASE("pose experiment smoke run: structure and determinism") {
  RunConfig config = smoke_config();
  Rng r1(5), r2(5);
  const AccuracyReport a = run_pose_experiment(config, r1);
  const AccuracyReport b = run_pose_experiment(config, r2);

  int centroid_rows = 0, position_rows = 0;
  for (const auto& row : a.rows) {
    if (row.condition == "centroid") ++centroid_rows;
    if (row.condition == "position") ++position_rows;
  }
  CHECK(centroid_rows == 3);  // one per object
  CHECK(position_rows == 3 * config.pose_runs);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].h_acc == b.rows[i].h_acc);
    CHECK(a.rows[i].condition == b.rows[i].condition);
  }
}

TEST_CASE("selection experiment smoke run") {
  RunConfig config = smoke_config();
  Rng rng(6);
  const AccuracyReport report = run_selection_experiment(config, rng);
  CHECK(report.metrics.count("adaptive_hit_rate") == 1);
  int congruent = 0, incongruent = 0, adaptive = 0;
  for (const auto& row : report.rows) {
    congruent += row.condition == "congruent";
    incongruent += row.condition == "incongruent";
    adaptive += row.condition == "adaptive";
  }
  CHECK(congruent + incongruent + adaptive + report.skipped >= 2 * config.n_conditions * 3);
  CHECK(congruent > 0);
  CHECK(adaptive > 0);
}

TEST_CASE("biasing experiment smoke run") {
  RunConfig config = smoke_config();
  Rng rng(7);
  const AccuracyReport report = run_biasing_experiment(config, BiasFamily::Mass, rng);
  // 4 models x 3 test conditions x 2 objects x conditions, minus skips.
  CHECK(static_cast<int>(report.rows.size()) + report.skipped >=
        4 * 3 * 2 * config.biasing_conditions);
  CHECK(report.metrics.count("train_displacement:mass:high:" +
                             ShapeSpec::cube(0.2).label()) == 1);
  bool found = false;
  for (const auto& row : report.rows)
    if (row.condition == "mass:low->high") found = true;
  CHECK(found);
}
