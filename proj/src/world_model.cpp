#include "safebench/world_model.hpp"

#include "safebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace safebench {

using detail::require;

RobotModel RobotModel::rigid_cluster(std::vector<Volume> volumes, std::size_t arm_volume_index) {
  RobotModel m;
  m.kind_ = RobotKind::RigidCluster;
  m.volumes_ = std::move(volumes);
  m.arm_volume_index_ = arm_volume_index;
  m.validate();
  return m;
}

RobotModel RobotModel::planar_arm(std::vector<double> link_lengths, std::vector<Volume> volumes,
                                  std::size_t arm_volume_index) {
  RobotModel m;
  m.kind_ = RobotKind::PlanarArm;
  m.link_lengths_ = std::move(link_lengths);
  m.volumes_ = std::move(volumes);
  m.arm_volume_index_ = arm_volume_index;
  m.validate();
  return m;
}

RobotModel RobotModel::default_cluster() {
  return rigid_cluster({{Vec3(0.0, 0.0, 0.0), 0, 0.10},
                        {Vec3(0.0, 0.15, 0.0), 0, 0.06},
                        {Vec3(0.0, -0.15, 0.0), 0, 0.06}},
                       1);
}

RobotModel RobotModel::default_arm() {
  return planar_arm({0.4, 0.3, 0.2},
                    {{Vec3::Zero(), 0, 0.05},
                     {Vec3::Zero(), 1, 0.05},
                     {Vec3::Zero(), 2, 0.04},
                     {Vec3::Zero(), 3, 0.04}},
                    3);
}

void RobotModel::validate() const {
  require(!volumes_.empty(), "robot model needs at least one volume");
  require(arm_volume_index_ < volumes_.size(), "arm_volume_index out of range");
  for (const auto& v : volumes_) {
    require(std::isfinite(v.radius) && v.radius > 0.0, "volume radius must be positive");
    require(v.offset.allFinite(), "volume offset must be finite");
  }
  if (kind_ == RobotKind::PlanarArm) {
    require(static_cast<int>(link_lengths_.size()) == kDof,
            "planar arm needs exactly " + std::to_string(kDof) + " links");
    for (double l : link_lengths_) {
      require(std::isfinite(l) && l > 0.0, "link lengths must be positive");
    }
    for (const auto& v : volumes_) {
      require(v.link >= 0 && v.link <= static_cast<int>(link_lengths_.size()),
              "volume link index out of range");
    }
  } else {
    require(link_lengths_.empty(), "rigid cluster has no links");
  }
}

void validate_state(const RobotModel& model, const RobotState& state) {
  (void)model;
  require(state.q.allFinite(), "robot state contains non-finite values");
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

void validate_obstacle(const Obstacle& obstacle) {
  require(obstacle.center.allFinite(), "obstacle center must be finite");
  require(std::isfinite(obstacle.radius) && obstacle.radius > 0.0,
          "obstacle radius must be positive");
}

namespace {

// Position and Jacobian of the point at fraction `s` along link `link`.
void arm_point(const std::vector<double>& lengths, const JointVector& q, int link, double s,
               Vec3& center, Jacobian& jac) {
  center.setZero();
  jac.setZero();
  double theta = 0.0;
  for (int k = 0; k <= link && k < static_cast<int>(lengths.size()); ++k) {
    theta += q[k];
    const double reach = (k == link) ? s * lengths[k] : lengths[k];
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    center.x() += reach * c;
    center.y() += reach * sn;
    // Every joint j <= k rotates this segment.
    for (int j = 0; j <= k; ++j) {
      jac(0, j) += -reach * sn;
      jac(1, j) += reach * c;
    }
  }
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state) {
  require(state.q.size() == model.dof(), "state dimension does not match robot dof");
  Kinematics out;
  out.centers.reserve(model.num_volumes());
  out.jacobians.reserve(model.num_volumes());

  if (model.kind() == RobotKind::RigidCluster) {
    for (const auto& v : model.volumes()) {
      out.centers.emplace_back(state.q + v.offset);
      out.jacobians.emplace_back(Jacobian::Identity());
    }
    return out;
  }

  const auto& lengths = model.link_lengths();
  const int n_links = static_cast<int>(lengths.size());
  for (const auto& v : model.volumes()) {
    Vec3 c;
    Jacobian j;
    if (v.link == n_links) {
      arm_point(lengths, state.q, n_links - 1, 1.0, c, j);
    } else {
      arm_point(lengths, state.q, v.link, 0.5, c, j);
    }
    out.centers.push_back(c);
    out.jacobians.push_back(j);
  }
  return out;
}

PairwiseInfo compute_pairwise_info(const RobotModel& model, const RobotState& state,
                                   std::span<const Obstacle> obstacles) {
  const Kinematics fk = forward_kinematics(model, state);
  PairwiseInfo info;
  info.t = state.t;
  info.num_volumes = model.num_volumes();
  info.num_obstacles = obstacles.size();
  info.d.resize(info.num_volumes * info.num_obstacles);
  info.grad.resize(info.d.size());

  for (std::size_t i = 0; i < info.num_volumes; ++i) {
    const double r = model.volumes()[i].radius;
    for (std::size_t j = 0; j < info.num_obstacles; ++j) {
      const Vec3 delta = fk.centers[i] - obstacles[j].center;
      const double dist = delta.norm();
      const std::size_t k = info.index(i, j);
      if (dist < 1e-12) {
        info.d[k] = -r - obstacles[j].radius;
        info.grad[k].setZero();
      } else {
        info.d[k] = dist - r - obstacles[j].radius;
        info.grad[k] = fk.jacobians[i].transpose() * (delta / dist);
      }
    }
  }
  return info;
}

double min_env_distance(const PairwiseInfo& info) {
  require(!info.d.empty(), "min_env_distance of an empty pairwise matrix");
  return *std::min_element(info.d.begin(), info.d.end());
}

std::size_t num_self_pairs(const RobotModel& model) {
  if (model.kind() != RobotKind::PlanarArm) return 0;
  const std::size_t n = model.num_volumes();
  return n >= 3 ? (n - 1) * (n - 2) / 2 : 0;
}

std::vector<double> self_pair_distances(const RobotModel& model, const RobotState& state) {
  if (model.kind() != RobotKind::PlanarArm) return {};
  const Kinematics fk = forward_kinematics(model, state);
  const auto& vols = model.volumes();
  std::vector<double> out;
  out.reserve(num_self_pairs(model));
  for (std::size_t i = 0; i < vols.size(); ++i) {
    for (std::size_t j = i + 2; j < vols.size(); ++j) {
      out.push_back((fk.centers[i] - fk.centers[j]).norm() - vols[i].radius - vols[j].radius);
    }
  }
  return out;
}

}  // namespace safebench
