#include "safebench/sim_core.hpp"

#include "safebench/errors.hpp"

#include <cmath>
#include <string>

namespace safebench {

using detail::require;

void SimConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(steps >= 1, "steps must be >= 1");
  require(std::isfinite(u_max) && u_max > 0.0, "u_max must be positive");
  require(std::isfinite(kp) && kp > 0.0, "kp must be positive");
  require(goal.allFinite(), "goal must be finite");
  require(start.allFinite(), "start must be finite");
}

void EpisodeLog::validate_shape() const {
  const std::size_t t = steps();
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ParseError("episode log: " + what);
  };
  check(meta.config.steps >= 0 && static_cast<std::size_t>(meta.config.steps) == t,
        "dist_goal_arm length " + std::to_string(t) + " does not match steps " +
            std::to_string(meta.config.steps));
  check(dist_robot_to_env.size() == t * pairs_per_step(), "dist_robot_to_env block size");
  check(perceived_dist_robot_to_env.size() == t * pairs_per_step(),
        "perceived_dist_robot_to_env block size");
  check(q_trace.size() == t * kDof, "q_trace size");
  check(u_nominal_trace.size() == t * kDof, "u_nominal_trace size");
  check(u_safe_trace.size() == t * kDof, "u_safe_trace size");
  check(filter_status_trace.size() == t, "filter_status_trace size");
  check(self_dist_trace.size() == t * meta.num_self_pairs, "self_dist_trace size");
  for (auto s : filter_status_trace) {
    check(s >= 0 && s <= static_cast<std::int32_t>(FilterStatus::NoSolution),
          "filter status value " + std::to_string(s) + " out of range");
  }
}

JointVector nominal_control(const RobotModel& model, const RobotState& state,
                            const SimConfig& config) {
  const Kinematics fk = forward_kinematics(model, state);
  const std::size_t arm = model.arm_volume_index();
  const Vec3 error = config.goal - fk.centers[arm];
  const JointVector u = config.kp * (fk.jacobians[arm].transpose() * error);
  return clamp_control(u, config.u_max);
}

RobotState integrate_step(const RobotModel& model, const RobotState& state, const JointVector& u,
                          double dt) {
  require(u.allFinite(), "control must be finite");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  RobotState next;
  next.q = state.q + dt * u;
  next.t = state.t + 1;
  if (model.kind() == RobotKind::PlanarArm) {
    for (int i = 0; i < kDof; ++i) next.q[i] = wrap_angle(next.q[i]);
  }
  return next;
}

std::uint64_t episode_stream_seed(const SimConfig& config, const AttackSpec& attack) {
  return combine_seed(config.seed, attack_hash(attack));
}

EpisodeLog run_episode(const RobotModel& model, std::span<const Obstacle> obstacles,
                       const SimConfig& config, const FilterSpec& filter, const AttackSpec& attack,
                       IntensityLevel level) {
  config.validate();
  validate_attack(attack);
  for (const auto& o : obstacles) validate_obstacle(o);
  if (const auto* crowd = std::get_if<attack::Crowding>(&attack)) {
    require(crowd->n_obstacles == obstacles.size(),
            "crowding attack expects " + std::to_string(crowd->n_obstacles) +
                " obstacles, scene has " + std::to_string(obstacles.size()));
  }

  FilterSpec effective = filter;
  effective.params.u_max = config.u_max;
  effective.params.validate();

  RobotState state;
  state.q = config.start;
  if (model.kind() == RobotKind::PlanarArm) {
    for (int i = 0; i < kDof; ++i) state.q[i] = wrap_angle(state.q[i]);
  }
  validate_state(model, state);

  EpisodeLog log;
  log.meta.config = config;
  log.meta.filter = effective;
  log.meta.attack = attack;
  log.meta.level = level;
  log.meta.robot = model.kind();
  log.meta.num_volumes = model.num_volumes();
  log.meta.num_obstacles = obstacles.size();
  log.meta.num_self_pairs = num_self_pairs(model);

  const auto steps = static_cast<std::size_t>(config.steps);
  const std::size_t block = log.pairs_per_step();
  log.dist_robot_to_env.reserve(steps * block);
  log.perceived_dist_robot_to_env.reserve(steps * block);
  log.dist_goal_arm.reserve(steps);
  log.q_trace.reserve(steps * kDof);
  log.u_nominal_trace.reserve(steps * kDof);
  log.u_safe_trace.reserve(steps * kDof);
  log.filter_status_trace.reserve(steps);
  log.self_dist_trace.reserve(steps * log.meta.num_self_pairs);

  PerceptionChannel channel(attack, episode_stream_seed(config, attack));
  const std::size_t arm = model.arm_volume_index();

  for (std::size_t k = 0; k < steps; ++k) {
    const PairwiseInfo truth = compute_pairwise_info(model, state, obstacles);
    const PairwiseInfo perceived = channel.perceive(truth);

    const Kinematics fk = forward_kinematics(model, state);
    const JointVector u_nom = nominal_control(model, state, config);
    const FilterOutput out = apply_filter(effective.kind, effective.params, u_nom, perceived);

    log.dist_robot_to_env.insert(log.dist_robot_to_env.end(), truth.d.begin(), truth.d.end());
    log.perceived_dist_robot_to_env.insert(log.perceived_dist_robot_to_env.end(),
                                           perceived.d.begin(), perceived.d.end());
    log.dist_goal_arm.push_back((config.goal - fk.centers[arm]).norm());
    for (int i = 0; i < kDof; ++i) {
      log.q_trace.push_back(state.q[i]);
      log.u_nominal_trace.push_back(u_nom[i]);
      log.u_safe_trace.push_back(out.u_safe[i]);
    }
    log.filter_status_trace.push_back(static_cast<std::int32_t>(out.status));
    if (log.meta.num_self_pairs > 0) {
      const auto self = self_pair_distances(model, state);
      log.self_dist_trace.insert(log.self_dist_trace.end(), self.begin(), self.end());
    }

    state = integrate_step(model, state, out.u_safe, config.dt);
  }
  return log;
}

}  // namespace safebench
