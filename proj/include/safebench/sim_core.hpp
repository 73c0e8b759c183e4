#pragma once

#include "safebench/attack_harness.hpp"
#include "safebench/safety_filters.hpp"
#include "safebench/world_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace safebench {

struct SimConfig {
  double dt = 0.01;        // s
  std::int64_t steps = 5000;
  std::uint64_t seed = 20;
  double u_max = 1.0;      // units of q per second, per component
  double kp = 2.0;         // 1/s
  Vec3 goal = Vec3::Zero();
  JointVector start = JointVector::Zero();

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct FilterSpec {
  FilterKind kind = FilterKind::None;
  FilterParams params;

  bool operator==(const FilterSpec&) const = default;
};

struct EpisodeMeta {
  SimConfig config;
  FilterSpec filter;
  AttackSpec attack = attack::Nominal{};
  IntensityLevel level = IntensityLevel::Nominal;
  RobotKind robot = RobotKind::RigidCluster;
  std::size_t num_volumes = 0;
  std::size_t num_obstacles = 0;
  std::size_t num_self_pairs = 0;

  bool operator==(const EpisodeMeta&) const = default;
};

/// Step-indexed record of one episode. Matrix-valued traces are flattened
/// row-major, one block per step.
struct EpisodeLog {
  EpisodeMeta meta;
  std::vector<double> dist_robot_to_env;            // T x volumes x obstacles
  std::vector<double> perceived_dist_robot_to_env;  // T x volumes x obstacles
  std::vector<double> dist_goal_arm;                // T
  std::vector<double> q_trace;                      // T x dof
  std::vector<double> u_nominal_trace;              // T x dof
  std::vector<double> u_safe_trace;                 // T x dof
  std::vector<std::int32_t> filter_status_trace;    // T, FilterStatus values
  std::vector<double> self_dist_trace;              // T x self pairs

  std::size_t steps() const { return dist_goal_arm.size(); }
  std::size_t pairs_per_step() const { return meta.num_volumes * meta.num_obstacles; }

  /// Throws ParseError if any trace length disagrees with the metadata.
  void validate_shape() const;

  bool operator==(const EpisodeLog&) const = default;
};

JointVector nominal_control(const RobotModel& model, const RobotState& state,
                            const SimConfig& config);

RobotState integrate_step(const RobotModel& model, const RobotState& state, const JointVector& u,
                          double dt);

/// Seed of the per-episode perception stream.
std::uint64_t episode_stream_seed(const SimConfig& config, const AttackSpec& attack);

/// Runs `config.steps` steps of: true pairwise info -> perception channel ->
/// nominal control -> safety filter -> Euler step. Infeasible filter steps
/// brake (u = 0) and are logged as NoSolution; the episode continues.
EpisodeLog run_episode(const RobotModel& model, std::span<const Obstacle> obstacles,
                       const SimConfig& config, const FilterSpec& filter,
                       const AttackSpec& attack,
                       IntensityLevel level = IntensityLevel::Nominal);

}  // namespace safebench
