#include "safebench/attack_harness.hpp"

#include "safebench/errors.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <sstream>

namespace safebench {

using detail::require;

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

AttackFamily family_of(const AttackSpec& spec) {
  return static_cast<AttackFamily>(spec.index());
}

std::string_view to_string(AttackFamily family) {
  switch (family) {
    case AttackFamily::None:
      return "none";
    case AttackFamily::Noise:
      return "noise";
    case AttackFamily::Latency:
      return "latency";
    case AttackFamily::Crowding:
      return "crowding";
  }
  return "?";
}

std::optional<AttackFamily> parse_attack_family(std::string_view name) {
  for (auto f : {AttackFamily::None, AttackFamily::Noise, AttackFamily::Latency,
                 AttackFamily::Crowding}) {
    if (iequals(name, to_string(f))) return f;
  }
  return std::nullopt;
}

void validate_attack(const AttackSpec& spec) {
  std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Noise>) {
          require(std::isfinite(a.sigma) && a.sigma >= 0.0, "noise sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, attack::Latency>) {
          require(a.delay >= 0, "latency delay must be >= 0");
        } else if constexpr (std::is_same_v<T, attack::Crowding>) {
          require(a.n_obstacles >= 1, "crowding needs at least one obstacle");
        }
      },
      spec);
}

std::uint64_t attack_hash(const AttackSpec& spec) {
  const auto tag = static_cast<std::uint64_t>(spec.index());
  const std::uint64_t payload = std::visit(
      [](const auto& a) -> std::uint64_t {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Noise>) {
          return std::bit_cast<std::uint64_t>(a.sigma);
        } else if constexpr (std::is_same_v<T, attack::Latency>) {
          return static_cast<std::uint64_t>(a.delay);
        } else if constexpr (std::is_same_v<T, attack::Crowding>) {
          return static_cast<std::uint64_t>(a.n_obstacles);
        } else {
          return 0;
        }
      },
      spec);
  return combine_seed(mix64(tag), payload);
}

std::string describe(const AttackSpec& spec) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Noise>) {
          os << "noise(sigma=" << a.sigma << ")";
        } else if constexpr (std::is_same_v<T, attack::Latency>) {
          os << "latency(delay=" << a.delay << ")";
        } else if constexpr (std::is_same_v<T, attack::Crowding>) {
          os << "crowding(n=" << a.n_obstacles << ")";
        } else {
          os << "nominal";
        }
      },
      spec);
  return os.str();
}

std::string_view to_string(IntensityLevel level) {
  switch (level) {
    case IntensityLevel::Nominal:
      return "nominal";
    case IntensityLevel::Low:
      return "low";
    case IntensityLevel::Medium:
      return "medium";
    case IntensityLevel::High:
      return "high";
  }
  return "?";
}

std::optional<IntensityLevel> parse_level(std::string_view name) {
  for (auto l : {IntensityLevel::Nominal, IntensityLevel::Low, IntensityLevel::Medium,
                 IntensityLevel::High}) {
    if (iequals(name, to_string(l))) return l;
  }
  return std::nullopt;
}

const AttackSpec& IntensitySchedule::at(IntensityLevel level) const {
  for (const auto& entry : levels) {
    if (entry.level == level) return entry.spec;
  }
  throw ConfigError("attack family '" + std::string(to_string(family)) + "' has no '" +
                    std::string(to_string(level)) + "' level");
}

IntensitySchedule schedule_levels(AttackFamily family) {
  using L = IntensityLevel;
  IntensitySchedule s;
  s.family = family;
  switch (family) {
    case AttackFamily::None:
      s.levels = {{L::Nominal, attack::Nominal{}}};
      break;
    case AttackFamily::Noise:
      s.levels = {{L::Nominal, attack::Noise{0.0}},
                  {L::Low, attack::Noise{0.02}},
                  {L::Medium, attack::Noise{0.05}},
                  {L::High, attack::Noise{0.10}}};
      break;
    case AttackFamily::Latency:
      s.levels = {{L::Nominal, attack::Latency{0}},
                  {L::Low, attack::Latency{2}},
                  {L::Medium, attack::Latency{5}},
                  {L::High, attack::Latency{10}}};
      break;
    case AttackFamily::Crowding:
      s.levels = {{L::Low, attack::Crowding{5}},
                  {L::Medium, attack::Crowding{15}},
                  {L::High, attack::Crowding{30}}};
      break;
  }
  return s;
}

PairwiseInfo perturb_noise(const PairwiseInfo& info, double sigma, Rng& rng) {
  require(std::isfinite(sigma) && sigma >= 0.0, "noise sigma must be >= 0");
  if (sigma == 0.0) return info;
  PairwiseInfo out = info;
  for (double& d : out.d) d += sigma * rng.normal();
  return out;
}

LatencyBuffer::LatencyBuffer(std::int64_t delay) : capacity_(0) {
  require(delay >= 0, "latency delay must be >= 0");
  capacity_ = static_cast<std::size_t>(delay) + 1;
}

PairwiseInfo LatencyBuffer::step(PairwiseInfo fresh) {
  snapshots_.push_back(std::move(fresh));
  if (snapshots_.size() > capacity_) snapshots_.pop_front();
  // Full buffer: front is t - delay. Warm-up: front is the first snapshot.
  return snapshots_.front();
}

PairwiseInfo latency_step(LatencyBuffer& buffer, PairwiseInfo fresh, std::int64_t delay) {
  require(delay >= 0 && buffer.capacity() == static_cast<std::size_t>(delay) + 1,
          "latency buffer capacity must equal delay + 1");
  return buffer.step(std::move(fresh));
}

PerceptionChannel::PerceptionChannel(const AttackSpec& spec, std::uint64_t episode_seed)
    : spec_(spec), rng_(episode_seed) {
  validate_attack(spec_);
  if (const auto* lat = std::get_if<attack::Latency>(&spec_)) buffer_.emplace(lat->delay);
}

PairwiseInfo PerceptionChannel::perceive(const PairwiseInfo& truth) {
  if (const auto* noise = std::get_if<attack::Noise>(&spec_)) {
    return perturb_noise(truth, noise->sigma, rng_);
  }
  if (const auto* lat = std::get_if<attack::Latency>(&spec_)) {
    return latency_step(*buffer_, truth, lat->delay);
  }
  return truth;
}

std::vector<Obstacle> generate_crowding_scene(std::size_t n_obstacles, std::uint64_t seed,
                                              const Box& workspace,
                                              const std::vector<Ball>& exclusions) {
  require(n_obstacles >= 1, "crowding needs at least one obstacle");
  require(workspace.lo.allFinite() && workspace.hi.allFinite() &&
              (workspace.hi - workspace.lo).minCoeff() >= 0.0,
          "workspace box must be finite with lo <= hi");

  Rng rng(combine_seed(seed, 0x5ce9eULL));
  std::vector<Obstacle> out;
  out.reserve(n_obstacles);
  int attempts = 0;
  while (out.size() < n_obstacles) {
    if (attempts++ >= kCrowdingMaxAttempts) {
      throw SceneGenerationError("could not place " + std::to_string(n_obstacles) +
                                 " obstacles outside the exclusion balls within " +
                                 std::to_string(kCrowdingMaxAttempts) + " attempts (placed " +
                                 std::to_string(out.size()) + ")");
    }
    Vec3 c;
    for (int k = 0; k < 3; ++k) c[k] = rng.uniform(workspace.lo[k], workspace.hi[k]);
    bool excluded = false;
    for (const auto& ball : exclusions) {
      if ((c - ball.center).norm() < ball.radius) {
        excluded = true;
        break;
      }
    }
    if (!excluded) out.push_back({c, kCrowdingObstacleRadius});
  }
  return out;
}

}  // namespace safebench
