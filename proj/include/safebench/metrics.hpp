#pragma once

#include "safebench/attack_harness.hpp"
#include "safebench/safety_filters.hpp"
#include "safebench/sim_core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace safebench {

struct RunIdentity {
  FilterKind filter = FilterKind::None;
  AttackFamily attack = AttackFamily::None;
  IntensityLevel level = IntensityLevel::Nominal;
  std::uint64_t seed = 0;
  RobotKind robot = RobotKind::RigidCluster;
  std::int64_t steps = 0;

  bool operator==(const RunIdentity&) const = default;
};

/// Canonical report order: filter name, attack name, level, seed.
bool report_order(const RunIdentity& a, const RunIdentity& b);

struct RunMetrics {
  RunIdentity id;
  std::int64_t collision_steps = 0;
  double mean_goal_distance = 0.0;
  double final_goal_distance = 0.0;
  double min_env_distance_overall = 0.0;
  std::int64_t no_solution_steps = 0;

  bool operator==(const RunMetrics&) const = default;
};

/// Per-step minimum clearance over all (volume, obstacle) pairs. A scene
/// without obstacles yields +infinity at every step.
std::vector<double> min_env_trace(const EpisodeLog& log);

/// Number of steps with a strictly negative clearance.
std::int64_t collision_steps(std::span<const double> trace);

/// Arithmetic mean with compensated summation. Throws on an empty trace.
double mean_goal_distance(std::span<const double> trace);

RunMetrics summarize_run(const EpisodeLog& log);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation; 0 when n == 1

  bool operator==(const MeanStd&) const = default;
};

MeanStd mean_and_sample_std(std::span<const double> values);

struct GroupSummary {
  FilterKind filter = FilterKind::None;
  AttackFamily attack = AttackFamily::None;
  IntensityLevel level = IntensityLevel::Nominal;
  std::vector<std::uint64_t> seeds;
  MeanStd collision_steps;
  MeanStd mean_goal_distance;
  MeanStd final_goal_distance;
  MeanStd min_env_distance;
  MeanStd no_solution_steps;
};

struct AggregateSummary {
  std::vector<GroupSummary> groups;  // sorted by (filter, attack, level)
};

/// Groups runs by (filter, attack, level) and reduces each metric across
/// seeds. Throws ContractViolation on an empty input.
AggregateSummary aggregate_seeds(std::span<const RunMetrics> runs);

}  // namespace safebench
