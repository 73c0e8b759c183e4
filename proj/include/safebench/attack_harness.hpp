#pragma once

#include "safebench/rng.hpp"
#include "safebench/world_model.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace safebench {

namespace attack {
struct Nominal {
  bool operator==(const Nominal&) const = default;
};
struct Noise {
  double sigma = 0.0;  // m
  bool operator==(const Noise&) const = default;
};
struct Latency {
  std::int64_t delay = 0;  // steps
  bool operator==(const Latency&) const = default;
};
struct Crowding {
  std::size_t n_obstacles = 5;
  bool operator==(const Crowding&) const = default;
};
}  // namespace attack

using AttackSpec = std::variant<attack::Nominal, attack::Noise, attack::Latency, attack::Crowding>;

enum class AttackFamily : std::uint8_t { None = 0, Noise, Latency, Crowding };

AttackFamily family_of(const AttackSpec& spec);
std::string_view to_string(AttackFamily family);
std::optional<AttackFamily> parse_attack_family(std::string_view name);

/// Throws ContractViolation on negative sigma/delay or zero obstacles.
void validate_attack(const AttackSpec& spec);

/// Stable 64-bit digest of the spec, used to derive the episode noise stream.
std::uint64_t attack_hash(const AttackSpec& spec);

std::string describe(const AttackSpec& spec);

enum class IntensityLevel : std::uint8_t { Nominal = 0, Low, Medium, High };

std::string_view to_string(IntensityLevel level);
std::optional<IntensityLevel> parse_level(std::string_view name);

struct ScheduledAttack {
  IntensityLevel level;
  AttackSpec spec;
};

/// Ordered attack magnitudes for one family.
struct IntensitySchedule {
  AttackFamily family = AttackFamily::None;
  std::vector<ScheduledAttack> levels;

  /// Throws ConfigError if the level is not part of this schedule.
  const AttackSpec& at(IntensityLevel level) const;
};

/// Noise: {0, 0.02, 0.05, 0.10} m; Latency: {0, 2, 5, 10} steps;
/// Crowding: low/medium/high = {5, 15, 30} obstacles (no nominal entry).
/// None yields a single nominal level.
IntensitySchedule schedule_levels(AttackFamily family);

/// Adds iid N(0, sigma^2) to every clearance in row-major pair order.
/// Gradients are left untouched. sigma == 0 returns the input unchanged
/// without consuming the stream.
PairwiseInfo perturb_noise(const PairwiseInfo& info, double sigma, Rng& rng);

/// Ring of the most recent (delay + 1) pairwise snapshots.
class LatencyBuffer {
 public:
  explicit LatencyBuffer(std::int64_t delay);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return snapshots_.size(); }

  /// Pushes `fresh` and returns the snapshot from step max(t - delay, first step).
  PairwiseInfo step(PairwiseInfo fresh);

 private:
  std::size_t capacity_;
  std::deque<PairwiseInfo> snapshots_;
};

PairwiseInfo latency_step(LatencyBuffer& buffer, PairwiseInfo fresh, std::int64_t delay);

/// The perception path between the true pairwise info and the filter.
/// Crowding acts on the scene, so its channel is the identity.
class PerceptionChannel {
 public:
  PerceptionChannel(const AttackSpec& spec, std::uint64_t episode_seed);

  PairwiseInfo perceive(const PairwiseInfo& truth);

 private:
  AttackSpec spec_;
  Rng rng_;
  std::optional<LatencyBuffer> buffer_;
};

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

inline constexpr double kCrowdingObstacleRadius = 0.1;
inline constexpr int kCrowdingMaxAttempts = 100000;

/// Samples obstacle centers uniformly in `workspace`, rejecting centers that
/// fall inside any exclusion ball. Throws SceneGenerationError when the
/// attempt budget runs out.
std::vector<Obstacle> generate_crowding_scene(std::size_t n_obstacles, std::uint64_t seed,
                                              const Box& workspace,
                                              const std::vector<Ball>& exclusions);

}  // namespace safebench
