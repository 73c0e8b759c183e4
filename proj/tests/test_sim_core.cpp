#include "safebench/errors.hpp"
#include "safebench/sim_core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace safebench;

namespace {

SimConfig short_config(std::int64_t steps = 200) {
  SimConfig c;
  c.steps = steps;
  c.start = JointVector(-0.8, 0, 0);
  c.goal = Vec3(0.8, 0.15, 0);
  return c;
}

const std::vector<Obstacle> kScene{{Vec3(0.0, 0.1, 0.0), 0.1}, {Vec3(0.3, -0.2, 0.05), 0.1}};

}  // namespace

TEST(SimCore, NominalControlForCluster) {
  const auto m = RobotModel::default_cluster();
  SimConfig c = short_config();
  RobotState s;
  s.q = JointVector(0.7, 0.1, 0.0);
  // Arm volume sits at q + (0, 0.15, 0); error = goal - that.
  const JointVector expect = c.kp * (c.goal - (s.q + Vec3(0, 0.15, 0)));
  EXPECT_TRUE(nominal_control(m, s, c).isApprox(expect));
  s.q = JointVector(-0.8, 0, 0);
  EXPECT_EQ(nominal_control(m, s, c), JointVector(1.0, 0.0, 0.0));
}

TEST(SimCore, NominalControlIsClampedGradientStep) {
  const auto m = RobotModel::default_arm();
  SimConfig c = short_config();
  c.goal = Vec3(-0.3, 0.6, 0);
  RobotState s;
  s.q = JointVector(0.4, 0.3, -0.2);
  // kp * J^T e equals -kp/2 * grad of |e|^2, checked by central differences.
  const auto ee = [&](const JointVector& q) {
    return oracle::volume_center(m, m.volumes()[m.arm_volume_index()], q);
  };
  JointVector expected;
  for (int i = 0; i < 3; ++i) {
    JointVector qp = s.q, qm = s.q;
    qp[i] += 1e-6;
    qm[i] -= 1e-6;
    const double fp = (c.goal - ee(qp)).squaredNorm(), fm = (c.goal - ee(qm)).squaredNorm();
    expected[i] = -0.5 * c.kp * (fp - fm) / 2e-6;
  }
  expected = expected.cwiseMax(-c.u_max).cwiseMin(c.u_max);
  EXPECT_LT((nominal_control(m, s, c) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SimCore, IntegrateWrapsArmAngles) {
  const auto arm = RobotModel::default_arm();
  RobotState s;
  s.q = JointVector(std::numbers::pi - 0.001, 0, 0);
  const auto next = integrate_step(arm, s, JointVector(1, 0, 0), 0.01);
  EXPECT_EQ(next.t, 1);
  EXPECT_NEAR(next.q[0], -std::numbers::pi + 0.009, 1e-12);
  const auto cl = integrate_step(RobotModel::default_cluster(), s, JointVector(1, 0, 0), 0.01);
  EXPECT_NEAR(cl.q[0], std::numbers::pi + 0.009, 1e-12);
}

TEST(SimCore, LogShapes) {
  const auto m = RobotModel::default_arm();
  const auto log = run_episode(m, kScene, short_config(50), {FilterKind::CBF, {}}, attack::Nominal{});
  EXPECT_EQ(log.steps(), 50u);
  EXPECT_EQ(log.dist_robot_to_env.size(), 50u * 4 * 2);
  EXPECT_EQ(log.q_trace.size(), 150u);
  EXPECT_EQ(log.self_dist_trace.size(), 50u * 3);
  EXPECT_EQ(log.filter_status_trace.size(), 50u);
  EXPECT_NO_THROW(log.validate_shape());
  auto broken = log;
  broken.q_trace.pop_back();
  EXPECT_THROW(broken.validate_shape(), ParseError);
}

TEST(SimCore, FirstRowMatchesStartPose) {
  const auto m = RobotModel::default_cluster();
  const auto c = short_config(5);
  const auto log = run_episode(m, kScene, c, {FilterKind::None, {}}, attack::Nominal{});
  for (int i = 0; i < 3; ++i) EXPECT_EQ(log.q_trace[static_cast<std::size_t>(i)], c.start[i]);
  RobotState s;
  s.q = c.start;
  const auto info = compute_pairwise_info(m, s, kScene);
  for (std::size_t k = 0; k < info.size(); ++k) EXPECT_EQ(log.dist_robot_to_env[k], info.d[k]);
}

TEST(SimCore, Deterministic) {
  const auto m = RobotModel::default_cluster();
  const auto c = short_config(300);
  for (auto k : {FilterKind::PFM, FilterKind::RSSA, FilterKind::SMA}) {
    const auto a = run_episode(m, kScene, c, {k, {}}, attack::Noise{0.05}, IntensityLevel::Medium);
    const auto b = run_episode(m, kScene, c, {k, {}}, attack::Noise{0.05}, IntensityLevel::Medium);
    EXPECT_EQ(a, b);
  }
}

TEST(SimCore, ZeroMagnitudeAttacksMatchNominalTraces) {
  const auto m = RobotModel::default_cluster();
  const auto c = short_config(300);
  const auto base = run_episode(m, kScene, c, {FilterKind::CBF, {}}, attack::Nominal{});
  for (const AttackSpec& a : {AttackSpec{attack::Noise{0.0}}, AttackSpec{attack::Latency{0}}}) {
    const auto log = run_episode(m, kScene, c, {FilterKind::CBF, {}}, a);
    EXPECT_EQ(log.dist_robot_to_env, base.dist_robot_to_env);
    EXPECT_EQ(log.perceived_dist_robot_to_env, base.perceived_dist_robot_to_env);
    EXPECT_EQ(log.q_trace, base.q_trace);
    EXPECT_EQ(log.u_safe_trace, base.u_safe_trace);
    EXPECT_EQ(log.filter_status_trace, base.filter_status_trace);
  }
}

TEST(SimCore, PinchedRobotBrakes) {
  const auto m = RobotModel::default_cluster();
  SimConfig c = short_config(100);
  c.start = JointVector::Zero();
  const std::vector<Obstacle> pinch{{Vec3(0.27, 0, 0), 0.14}, {Vec3(-0.27, 0, 0), 0.14}};
  const auto log = run_episode(m, pinch, c, {FilterKind::CBF, {}}, attack::Nominal{});
  EXPECT_EQ(log.steps(), 100u);
  for (auto s : log.filter_status_trace) EXPECT_EQ(s, static_cast<int>(FilterStatus::NoSolution));
  for (double u : log.u_safe_trace) EXPECT_EQ(u, 0.0);
}

TEST(SimCore, CrowdingCountMustMatchScene) {
  const auto m = RobotModel::default_cluster();
  EXPECT_THROW(run_episode(m, kScene, short_config(5), {FilterKind::CBF, {}}, attack::Crowding{5}),
               ContractViolation);
}

TEST(SimCore, ConfigValidation) {
  SimConfig c = short_config();
  c.dt = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = short_config();
  c.steps = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = short_config();
  c.goal[0] = NAN;
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(SimCore, ComposedEulerStepsAreLinear) {
  const auto m = RobotModel::default_cluster();
  RobotState s;
  const JointVector u(1, 2, 3);
  for (int i = 0; i < 100; ++i) s = integrate_step(m, s, u, 0.01);
  EXPECT_EQ(s.t, 100);
  EXPECT_LT((s.q - 100 * 0.01 * u).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SimCore, FreeSpaceConvergesGeometrically) {
  // Unsaturated proportional control contracts the error by (1 - kp dt) per step.
  const auto m = RobotModel::default_cluster();
  SimConfig c;
  c.start = JointVector(0.06, -0.08 - 0.15, 0.0);  // arm volume 0.1 m from the goal
  c.goal = Vec3::Zero();
  const auto horizon = static_cast<std::int64_t>(5.0 / (c.kp * c.dt));
  c.steps = horizon + 1;
  const auto log = run_episode(m, {}, c, {FilterKind::None, {}}, attack::Nominal{});
  for (std::size_t t = 1; t < log.steps(); ++t) {
    EXPECT_LE(log.dist_goal_arm[t], log.dist_goal_arm[t - 1]);
    EXPECT_NEAR(log.dist_goal_arm[t], 0.1 * std::pow(1 - c.kp * c.dt, static_cast<double>(t)), 1e-12);
  }
  EXPECT_LT(log.dist_goal_arm.back(), 1e-3);
}

TEST(SimCore, AppliedControlWithinBounds) {
  const auto m = RobotModel::default_arm();
  SimConfig c = short_config(500);
  c.start = JointVector::Zero();
  c.goal = Vec3(-0.3, 0.6, 0);
  for (auto k : {FilterKind::PFM, FilterKind::SMA, FilterKind::CBF, FilterKind::RSSS}) {
    const auto log = run_episode(m, kScene, c, {k, {}}, attack::Noise{0.1}, IntensityLevel::High);
    for (double u : log.u_safe_trace) EXPECT_LE(std::abs(u), c.u_max + 1e-9);
    for (std::size_t t = 0; t < log.steps(); ++t) {
      if (log.filter_status_trace[t] != static_cast<int>(FilterStatus::Inactive)) continue;
      for (int i = 0; i < 3; ++i) EXPECT_EQ(log.u_safe_trace[3 * t + i], log.u_nominal_trace[3 * t + i]);
    }
  }
}
