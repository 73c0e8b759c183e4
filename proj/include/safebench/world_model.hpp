#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace safebench {

/// Both robot models are three-dimensional in configuration space.
inline constexpr int kDof = 3;

using Vec3 = Eigen::Vector3d;
using JointVector = Eigen::Matrix<double, kDof, 1>;
using Jacobian = Eigen::Matrix<double, 3, kDof>;

enum class RobotKind : std::uint8_t { RigidCluster = 0, PlanarArm = 1 };

/// A collision sphere attached to the robot.
///
/// RigidCluster: `offset` is the sphere center relative to the cluster origin q.
/// PlanarArm: `link` selects the midpoint of that link; link == number of links
/// selects the end effector. `offset` is unused.
struct Volume {
  Vec3 offset = Vec3::Zero();
  int link = 0;
  double radius = 0.0;

  bool operator==(const Volume&) const = default;
};

class RobotModel {
 public:
  static RobotModel rigid_cluster(std::vector<Volume> volumes, std::size_t arm_volume_index);
  static RobotModel planar_arm(std::vector<double> link_lengths, std::vector<Volume> volumes,
                               std::size_t arm_volume_index);

  /// Three spheres: a torso and two side "hands"; volume 1 tracks the goal.
  static RobotModel default_cluster();
  /// Three links (0.4, 0.3, 0.2 m) with a sphere at each link midpoint and
  /// at the end effector; the end effector tracks the goal.
  static RobotModel default_arm();

  RobotKind kind() const { return kind_; }
  int dof() const { return kDof; }
  const std::vector<Volume>& volumes() const { return volumes_; }
  std::size_t num_volumes() const { return volumes_.size(); }
  const std::vector<double>& link_lengths() const { return link_lengths_; }
  std::size_t arm_volume_index() const { return arm_volume_index_; }

  bool operator==(const RobotModel&) const = default;

 private:
  RobotModel() = default;
  void validate() const;

  RobotKind kind_ = RobotKind::RigidCluster;
  std::vector<Volume> volumes_;
  std::vector<double> link_lengths_;
  std::size_t arm_volume_index_ = 0;
};

struct RobotState {
  JointVector q = JointVector::Zero();
  std::int64_t t = 0;
};

/// Throws ContractViolation on non-finite q.
void validate_state(const RobotModel& model, const RobotState& state);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

struct Obstacle {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;

  bool operator==(const Obstacle&) const = default;
};

void validate_obstacle(const Obstacle& obstacle);

/// Signed clearances and configuration-space gradients for every
/// (robot volume, obstacle) pair, row-major: index = volume * obstacles + obstacle.
struct PairwiseInfo {
  std::int64_t t = 0;
  std::size_t num_volumes = 0;
  std::size_t num_obstacles = 0;
  std::vector<double> d;
  std::vector<JointVector> grad;

  std::size_t size() const { return d.size(); }
  std::size_t index(std::size_t volume, std::size_t obstacle) const {
    return volume * num_obstacles + obstacle;
  }
  double distance(std::size_t volume, std::size_t obstacle) const {
    return d[index(volume, obstacle)];
  }

  bool operator==(const PairwiseInfo&) const = default;
};

struct Kinematics {
  std::vector<Vec3> centers;
  std::vector<Jacobian> jacobians;
};

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state);

PairwiseInfo compute_pairwise_info(const RobotModel& model, const RobotState& state,
                                   std::span<const Obstacle> obstacles);

/// Smallest clearance over all pairs. Throws on an empty matrix.
double min_env_distance(const PairwiseInfo& info);

/// Clearances between all non-adjacent volume pairs of a planar arm, in
/// (i, j) lexicographic order with j >= i + 2. Empty for a rigid cluster.
std::vector<double> self_pair_distances(const RobotModel& model, const RobotState& state);

/// Number of entries self_pair_distances returns for this model.
std::size_t num_self_pairs(const RobotModel& model);

}  // namespace safebench
