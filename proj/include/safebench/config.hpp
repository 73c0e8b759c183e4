#pragma once

#include "safebench/attack_harness.hpp"
#include "safebench/safety_filters.hpp"
#include "safebench/sim_core.hpp"
#include "safebench/world_model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace safebench {

enum class SceneKind : std::uint8_t { Crowding, Explicit };

struct SceneSpec {
  SceneKind kind = SceneKind::Crowding;
  std::size_t n_obstacles = 5;
  std::vector<Obstacle> obstacles;  // Explicit only
  Box workspace;
  /// Clearance added around the start and goal poses when sampling obstacles.
  double exclusion_margin = 0.1;
};

/// Everything a benchmark invocation needs. Defaults reproduce the baseline
/// protocol: six filters, seeds {20, 21, 22}, 5000 steps, five obstacles.
struct BenchmarkConfig {
  RobotKind robot = RobotKind::RigidCluster;
  SimConfig sim;  // seed is overwritten per run
  SceneSpec scene;
  FilterParams params;
  std::vector<FilterKind> filters;
  AttackFamily attack = AttackFamily::None;
  std::vector<IntensityLevel> levels;  // empty: every level of the schedule
  std::vector<std::uint64_t> seeds{20, 21, 22};
  std::filesystem::path out_dir = "runs";
  int jobs = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Baseline defaults for the given robot.
BenchmarkConfig default_config(RobotKind robot = RobotKind::RigidCluster);

RobotModel make_robot(RobotKind kind);

std::string_view to_string(RobotKind kind);

/// Parses the flat key-value format. The first non-comment line must be the
/// version header `safebench-config 1`. Throws ConfigError with a line number.
BenchmarkConfig parse_config(const std::string& text);
BenchmarkConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const BenchmarkConfig& config);

/// The obstacles a run with this seed and attack actually sees.
std::vector<Obstacle> build_scene(const BenchmarkConfig& config, const AttackSpec& attack,
                                  std::uint64_t seed);

/// Balls around the start and goal poses that sampled obstacle centers avoid.
std::vector<Ball> scene_exclusions(const BenchmarkConfig& config);

}  // namespace safebench
