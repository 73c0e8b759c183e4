#include "safebench/attack_harness.hpp"
#include "safebench/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace safebench;

namespace {

PairwiseInfo constant_info(std::size_t n, double d, std::int64_t t = 0) {
  PairwiseInfo info;
  info.t = t;
  info.num_volumes = 1;
  info.num_obstacles = n;
  info.d.assign(n, d);
  info.grad.assign(n, JointVector(1, 0, 0));
  return info;
}

}  // namespace

TEST(Schedule, Magnitudes) {
  const auto noise = schedule_levels(AttackFamily::Noise);
  ASSERT_EQ(noise.levels.size(), 4u);
  const double sigmas[] = {0.0, 0.02, 0.05, 0.10};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(std::get<attack::Noise>(noise.levels[i].spec).sigma, sigmas[i]);
  const auto lat = schedule_levels(AttackFamily::Latency);
  const std::int64_t delays[] = {0, 2, 5, 10};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(std::get<attack::Latency>(lat.levels[i].spec).delay, delays[i]);
  const auto crowd = schedule_levels(AttackFamily::Crowding);
  ASSERT_EQ(crowd.levels.size(), 3u);
  EXPECT_EQ(std::get<attack::Crowding>(crowd.at(IntensityLevel::Low)).n_obstacles, 5u);
  EXPECT_EQ(std::get<attack::Crowding>(crowd.at(IntensityLevel::Medium)).n_obstacles, 15u);
  EXPECT_EQ(std::get<attack::Crowding>(crowd.at(IntensityLevel::High)).n_obstacles, 30u);
  EXPECT_THROW(crowd.at(IntensityLevel::Nominal), ConfigError);
  EXPECT_EQ(schedule_levels(AttackFamily::None).levels.size(), 1u);
}

TEST(Schedule, NamesRoundTrip) {
  for (auto f : {AttackFamily::None, AttackFamily::Noise, AttackFamily::Latency, AttackFamily::Crowding}) {
    EXPECT_EQ(parse_attack_family(to_string(f)), f);
  }
  for (auto l : {IntensityLevel::Nominal, IntensityLevel::Low, IntensityLevel::Medium, IntensityLevel::High}) {
    EXPECT_EQ(parse_level(to_string(l)), l);
  }
  EXPECT_FALSE(parse_attack_family("jamming"));
}

TEST(Attack, Validation) {
  EXPECT_THROW(validate_attack(attack::Noise{-0.1}), ContractViolation);
  EXPECT_THROW(validate_attack(attack::Latency{-1}), ContractViolation);
  EXPECT_THROW(validate_attack(attack::Crowding{0}), ContractViolation);
  EXPECT_NO_THROW(validate_attack(attack::Noise{0.0}));
}

TEST(Attack, HashSeparatesSpecs) {
  EXPECT_NE(attack_hash(attack::Noise{0.02}), attack_hash(attack::Noise{0.05}));
  EXPECT_NE(attack_hash(attack::Noise{0.0}), attack_hash(attack::Latency{0}));
  EXPECT_EQ(attack_hash(attack::Latency{5}), attack_hash(attack::Latency{5}));
}

// The Box-Muller transform written out against the standard engine.
TEST(Rng, NormalMatchesReferenceTransform) {
  Rng rng(1234);
  std::mt19937_64 ref(1234);
  for (int i = 0; i < 1000; ++i) {
    const double u1 = (static_cast<double>(ref() >> 11) + 1.0) / 9007199254740992.0;
    const double u2 = static_cast<double>(ref() >> 11) / 9007199254740992.0;
    const double expected = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    EXPECT_EQ(rng.normal(), expected);
  }
}

TEST(Noise, ZeroSigmaIsIdentityAndConsumesNothing) {
  Rng a(5), b(5);
  const auto info = constant_info(4, 0.3);
  EXPECT_EQ(perturb_noise(info, 0.0, a), info);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Noise, MomentsMatchSigma) {
  Rng rng(77);
  const double sigma = 0.05;
  const auto info = constant_info(1000, 0.3);
  long double sum = 0, sq = 0;
  std::size_t n = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto out = perturb_noise(info, sigma, rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const long double e = out.d[i] - 0.3;
      sum += e;
      sq += e * e;
      ++n;
      EXPECT_EQ(out.grad[i], info.grad[i]);
    }
  }
  const double mean = static_cast<double>(sum / n);
  const double var = static_cast<double>(sq / n) - mean * mean;
  // 1e5 draws: the standard error of the mean is sigma/316.
  EXPECT_LT(std::abs(mean), 5 * sigma / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(std::sqrt(var), sigma, 0.01 * sigma);
}

TEST(Noise, AddsPortableDrawsInPairOrder) {
  Rng rng(9), ref(9);
  const auto out = perturb_noise(constant_info(3, 1.0), 0.1, rng);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out.d[i], 1.0 + 0.1 * ref.normal());
}

TEST(Latency, ShiftsByDelayAfterWarmup) {
  for (std::int64_t delay : {0, 1, 2, 5, 10}) {
    LatencyBuffer buf(delay);
    for (std::int64_t t = 0; t < 40; ++t) {
      const auto seen = latency_step(buf, constant_info(2, static_cast<double>(t), t), delay);
      EXPECT_EQ(seen.t, std::max<std::int64_t>(t - delay, 0));
      EXPECT_EQ(seen.d[0], static_cast<double>(std::max<std::int64_t>(t - delay, 0)));
    }
    EXPECT_EQ(buf.size(), static_cast<std::size_t>(delay) + 1);
  }
  LatencyBuffer wrong(3);
  EXPECT_THROW(latency_step(wrong, constant_info(1, 0.0), 4), ContractViolation);
}

TEST(Perception, CrowdingAndNominalAreIdentity) {
  const auto info = constant_info(3, 0.25);
  PerceptionChannel a(attack::Crowding{15}, 1), b(attack::Nominal{}, 1);
  EXPECT_EQ(a.perceive(info), info);
  EXPECT_EQ(b.perceive(info), info);
}

TEST(Crowding, ContainedAndClearOfExclusions) {
  const Box box{Vec3(-0.5, -0.4, -0.1), Vec3(0.5, 0.4, 0.1)};
  const std::vector<Ball> excl{{Vec3(0, 0, 0), 0.2}, {Vec3(0.4, 0.3, 0), 0.1}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto obs = generate_crowding_scene(30, seed, box, excl);
    ASSERT_EQ(obs.size(), 30u);
    for (const auto& o : obs) {
      EXPECT_TRUE((o.center.array() >= box.lo.array()).all());
      EXPECT_TRUE((o.center.array() <= box.hi.array()).all());
      EXPECT_EQ(o.radius, kCrowdingObstacleRadius);
      for (const auto& b : excl) EXPECT_GE((o.center - b.center).norm(), b.radius);
    }
    EXPECT_EQ(obs, generate_crowding_scene(30, seed, box, excl));
  }
  EXPECT_NE(generate_crowding_scene(5, 1, box, excl), generate_crowding_scene(5, 2, box, excl));
}

TEST(Crowding, FlatWorkspaceStaysInPlane) {
  const Box plane{Vec3(-1, -1, 0), Vec3(1, 1, 0)};
  for (const auto& o : generate_crowding_scene(10, 3, plane, {})) EXPECT_EQ(o.center.z(), 0.0);
}

TEST(Crowding, ImpossibleSceneReportsError) {
  const Box box{Vec3(-0.1, -0.1, -0.1), Vec3(0.1, 0.1, 0.1)};
  EXPECT_THROW(generate_crowding_scene(3, 1, box, {{Vec3::Zero(), 1.0}}), SceneGenerationError);
}
