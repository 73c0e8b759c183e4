// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the code under test except for plain data types.
#pragma once

#include "safebench/qp_solver.hpp"
#include "safebench/world_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using safebench::JointVector;
using safebench::LinearConstraint;

struct Projection {
  JointVector u = JointVector::Zero();
  double objective = std::numeric_limits<double>::infinity();
};

inline std::vector<LinearConstraint> with_box(std::span<const LinearConstraint> cs, double u_max) {
  std::vector<LinearConstraint> all(cs.begin(), cs.end());
  for (int i = 0; i < 3; ++i) {
    LinearConstraint up, lo;
    up.a = JointVector::Zero();
    up.a[i] = -1.0;
    up.b = -u_max;
    lo.a = JointVector::Zero();
    lo.a[i] = 1.0;
    lo.b = -u_max;
    all.push_back(up);
    all.push_back(lo);
  }
  return all;
}

inline bool satisfies(std::span<const LinearConstraint> all, const JointVector& u, double tol) {
  for (const auto& c : all) {
    if (c.a.dot(u) < c.b - tol) return false;
  }
  return true;
}

/// Exact projection by enumerating every active set of at most three
/// constraints: the optimum of a strictly convex QP in R^3 is the projection
/// onto the affine hull of some such set. nullopt when no candidate is feasible.
inline std::optional<Projection> enumerate_projection(const JointVector& u_nom,
                                                      std::span<const LinearConstraint> cs,
                                                      double u_max, double tol = 1e-9) {
  const auto all = with_box(cs, u_max);
  const int m = static_cast<int>(all.size());
  std::optional<Projection> best;
  auto consider = [&](const std::vector<int>& act) {
    JointVector u = u_nom;
    if (!act.empty()) {
      const int k = static_cast<int>(act.size());
      Eigen::MatrixXd A(k, 3);
      Eigen::VectorXd r(k);
      for (int i = 0; i < k; ++i) {
        A.row(i) = all[act[i]].a.transpose();
        r[i] = all[act[i]].b - all[act[i]].a.dot(u_nom);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A * A.transpose());
      if (lu.rank() < k) return;
      u = u_nom + A.transpose() * lu.solve(r);
    }
    if (!satisfies(all, u, tol)) return;
    const double obj = (u - u_nom).squaredNorm();
    if (!best || obj < best->objective) best = Projection{u, obj};
  };
  consider({});
  for (int i = 0; i < m; ++i) {
    consider({i});
    for (int j = i + 1; j < m; ++j) {
      consider({i, j});
      for (int k = j + 1; k < m; ++k) consider({i, j, k});
    }
  }
  return best;
}

/// Best objective over a uniform grid of the box, restricted to feasible
/// points. Only an upper bound on the true optimum.
inline std::optional<double> grid_projection_bound(const JointVector& u_nom,
                                                   std::span<const LinearConstraint> cs,
                                                   double u_max, int n) {
  std::optional<double> best;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) {
        JointVector u(-u_max + 2.0 * u_max * i / n, -u_max + 2.0 * u_max * j / n,
                      -u_max + 2.0 * u_max * k / n);
        if (!satisfies(cs, u, 0.0)) continue;
        const double obj = (u - u_nom).squaredNorm();
        if (!best || obj < *best) best = obj;
      }
    }
  }
  return best;
}

/// Sphere center for one volume, recomputed from first principles.
inline safebench::Vec3 volume_center(const safebench::RobotModel& model,
                                     const safebench::Volume& v, const JointVector& q) {
  if (model.kind() == safebench::RobotKind::RigidCluster) return q + v.offset;
  const auto& L = model.link_lengths();
  double x = 0.0, y = 0.0, angle = 0.0;
  for (int link = 0; link < static_cast<int>(L.size()); ++link) {
    angle += q[link];
    const double frac = (link == v.link) ? 0.5 : 1.0;
    x += frac * L[link] * std::cos(angle);
    y += frac * L[link] * std::sin(angle);
    if (link == v.link) return {x, y, 0.0};
  }
  return {x, y, 0.0};
}

inline double clearance(const safebench::RobotModel& model, std::size_t volume,
                        const safebench::Obstacle& o, const JointVector& q) {
  const auto& v = model.volumes()[volume];
  return (volume_center(model, v, q) - o.center).norm() - v.radius - o.radius;
}

/// Central-difference gradient of one pair's clearance with respect to q.
inline JointVector fd_gradient(const safebench::RobotModel& model, std::size_t volume,
                               const safebench::Obstacle& o, const JointVector& q,
                               double h = 1e-6) {
  JointVector g;
  for (int i = 0; i < 3; ++i) {
    JointVector qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (clearance(model, volume, o, qp) - clearance(model, volume, o, qm)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
