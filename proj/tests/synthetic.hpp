// Random but well-formed episode logs for metric and serialisation tests.
#pragma once

#include "safebench/sim_core.hpp"

#include <random>

namespace synthetic {

inline safebench::EpisodeLog random_log(std::mt19937_64& gen, std::size_t max_steps = 400) {
  using namespace safebench;
  std::uniform_int_distribution<std::size_t> steps(1, max_steps), vols(1, 4), obs(1, 6);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_real_distribution<double> dist(-0.2, 1.5), goal(0.0, 2.0), q(-3, 3);
  EpisodeLog log;
  auto& m = log.meta;
  const std::size_t T = steps(gen);
  m.robot = coin(gen) % 2 ? RobotKind::PlanarArm : RobotKind::RigidCluster;
  m.num_volumes = vols(gen);
  m.num_obstacles = obs(gen);
  m.num_self_pairs = m.robot == RobotKind::PlanarArm ? 3 : 0;
  m.config.steps = static_cast<std::int64_t>(T);
  m.config.seed = gen();
  m.config.dt = 0.01 * (1 + coin(gen));
  m.config.goal = Vec3(q(gen), q(gen), q(gen));
  m.config.start = JointVector(q(gen), q(gen), q(gen));
  m.filter.kind = static_cast<FilterKind>(gen() % 8);
  m.filter.params.k_rep = goal(gen);
  switch (coin(gen)) {
    case 0: m.attack = attack::Nominal{}; break;
    case 1: m.attack = attack::Noise{goal(gen) / 10}; m.level = IntensityLevel::Medium; break;
    case 2: m.attack = attack::Latency{static_cast<std::int64_t>(gen() % 11)}; m.level = IntensityLevel::High; break;
    default: m.attack = attack::Crowding{m.num_obstacles}; m.level = IntensityLevel::Low; break;
  }
  const std::size_t P = m.num_volumes * m.num_obstacles;
  for (std::size_t i = 0; i < T * P; ++i) {
    // Exact zeros exercise the strict collision boundary.
    const int c = coin(gen);
    log.dist_robot_to_env.push_back(c == 0 && gen() % 8 == 0 ? 0.0 : dist(gen));
  }
  log.perceived_dist_robot_to_env = log.dist_robot_to_env;
  for (auto& d : log.perceived_dist_robot_to_env) d += 0.01 * (dist(gen) - 0.65);
  for (std::size_t t = 0; t < T; ++t) {
    log.dist_goal_arm.push_back(goal(gen) * (coin(gen) == 0 ? 1e-6 : 1.0));
    log.filter_status_trace.push_back(static_cast<std::int32_t>(gen() % 3));
    for (int k = 0; k < 3; ++k) {
      log.q_trace.push_back(q(gen));
      log.u_nominal_trace.push_back(q(gen) / 3);
      log.u_safe_trace.push_back(q(gen) / 3);
    }
    for (std::size_t k = 0; k < m.num_self_pairs; ++k) log.self_dist_trace.push_back(dist(gen));
  }
  return log;
}

}  // namespace synthetic
