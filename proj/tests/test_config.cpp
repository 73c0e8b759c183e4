#include "safebench/config.hpp"
#include "safebench/errors.hpp"

#include <gtest/gtest.h>

using namespace safebench;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsReproduceBaselineProtocol) {
  const auto c = parse_config("safebench-config 1\n");
  EXPECT_EQ(c.robot, RobotKind::RigidCluster);
  EXPECT_EQ(c.sim.steps, 5000);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{20, 21, 22}));
  EXPECT_EQ(c.filters, (std::vector<FilterKind>{FilterKind::RSSA, FilterKind::RSSS, FilterKind::SSA,
                                                FilterKind::CBF, FilterKind::PFM, FilterKind::SMA}));
  EXPECT_EQ(c.scene.n_obstacles, 5u);
  EXPECT_EQ(c.params, FilterParams{});
}

TEST(Config, ParsesEveryKey) {
  const auto c = parse_config(R"(# comment line
safebench-config 1
robot = planar_arm
steps = 1200      # trailing comment
dt = 0.02
u_max = 0.8
kp = 1.5
goal = -0.3 0.6 0
start = 0.1 0.2 0.3
scene = explicit
obstacle = 0.5 0.2 0 0.1
obstacle = -0.2 0.4 0 0.05
filters = CBF, pfm
seeds = 1,2,3,4,5
attack = noise
levels = nominal,high
out = some/dir
jobs = 2
d_margin = 0.04
alpha = 3
eta = 0.2
lambda_sss = 4
k_rep = 0.25
rho0 = 0.2
k_slide = 0.4
eps_robust = 0.03
)");
  EXPECT_EQ(c.robot, RobotKind::PlanarArm);
  EXPECT_EQ(c.sim.steps, 1200);
  EXPECT_EQ(c.sim.dt, 0.02);
  EXPECT_EQ(c.params.u_max, 0.8);
  EXPECT_EQ(c.scene.kind, SceneKind::Explicit);
  ASSERT_EQ(c.scene.obstacles.size(), 2u);
  EXPECT_EQ(c.scene.obstacles[1].radius, 0.05);
  EXPECT_EQ(c.filters, (std::vector<FilterKind>{FilterKind::CBF, FilterKind::PFM}));
  EXPECT_EQ(c.levels, (std::vector<IntensityLevel>{IntensityLevel::Nominal, IntensityLevel::High}));
  EXPECT_EQ(c.out_dir, "some/dir");
  EXPECT_EQ(c.params.k_rep, 0.25);
  EXPECT_EQ(c.params.eps_robust, 0.03);
}

TEST(Config, FormatRoundTrips) {
  for (auto robot : {RobotKind::RigidCluster, RobotKind::PlanarArm}) {
    auto c = default_config(robot);
    c.params.alpha = 0.1 + 0.2;  // not exactly representable in short decimal
    const std::string text = format_config(c);
    EXPECT_EQ(format_config(parse_config(text)), text);
    EXPECT_EQ(parse_config(text).params, c.params);
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("safebench-config 1\nsteps = 10\nsteps = 11\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("safebench-config 1\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("safebench-config 1\nfilters = CBF,XYZ\n").find("PFM"), std::string::npos);
  EXPECT_NE(error_of("safebench-config 2\n"), "");
  EXPECT_NE(error_of("steps = 10\n"), "");
  EXPECT_NE(error_of(""), "");
  EXPECT_NE(error_of("safebench-config 1\nsteps = ten\n"), "");
  EXPECT_NE(error_of("safebench-config 1\nobstacle = 0 0 0 0.1\n"), "");
  EXPECT_NE(error_of("safebench-config 1\nattack = crowding\nlevels = nominal\n"), "");
  EXPECT_NE(error_of("safebench-config 1\nrobot = hexapod\n"), "");
  EXPECT_NE(error_of("safebench-config 1\nalpha = -1\n"), "");
}

TEST(Config, CrowdingSceneAvoidsStartAndGoal) {
  for (auto robot : {RobotKind::RigidCluster, RobotKind::PlanarArm}) {
    auto c = default_config(robot);
    const auto exclusions = scene_exclusions(c);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto scene = build_scene(c, attack::Crowding{30}, seed);
      EXPECT_EQ(scene.size(), 30u);
      for (const auto& o : scene) {
        for (const auto& b : exclusions) EXPECT_GE((o.center - b.center).norm(), b.radius);
      }
      // The robot starts clear of every sampled obstacle.
      RobotState s;
      s.q = c.sim.start;
      EXPECT_GT(min_env_distance(compute_pairwise_info(make_robot(robot), s, scene)), 0.0);
    }
  }
}

TEST(Config, SceneDependsOnSeedNotAttack) {
  const auto c = default_config();
  EXPECT_EQ(build_scene(c, attack::Nominal{}, 20), build_scene(c, attack::Noise{0.1}, 20));
  EXPECT_EQ(build_scene(c, attack::Nominal{}, 20), build_scene(c, attack::Crowding{5}, 20));
  EXPECT_NE(build_scene(c, attack::Nominal{}, 20), build_scene(c, attack::Nominal{}, 21));
}
