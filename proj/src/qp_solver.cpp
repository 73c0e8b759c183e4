#include "safebench/qp_solver.hpp"

#include "safebench/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace safebench {

namespace {

constexpr double kViolationTol = 1e-10;
constexpr double kDependentTol = 1e-14;
constexpr double kDualTol = 1e-14;
constexpr int kMaxIterations = 500;

struct ActiveSet {
  std::vector<std::size_t> index;
  std::vector<double> lambda;
  Eigen::Matrix<double, kDof, Eigen::Dynamic, 0, kDof, kDof> normals;

  std::size_t size() const { return index.size(); }

  void add(std::size_t i, const JointVector& a, double multiplier) {
    index.push_back(i);
    lambda.push_back(multiplier);
    normals.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(index.size()));
    normals.col(normals.cols() - 1) = a;
  }

  void drop(std::size_t pos) {
    index.erase(index.begin() + static_cast<std::ptrdiff_t>(pos));
    lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(pos));
    const Eigen::Index n = normals.cols();
    for (Eigen::Index c = static_cast<Eigen::Index>(pos); c + 1 < n; ++c) {
      normals.col(c) = normals.col(c + 1);
    }
    normals.conservativeResize(Eigen::NoChange, n - 1);
  }
};

}  // namespace

QpResult solve_projection_qp(const JointVector& u_nom, std::span<const LinearConstraint> constraints,
                             double u_max) {
  detail::require(u_nom.allFinite(), "u_nom must be finite");
  detail::require(std::isfinite(u_max) && u_max > 0.0, "u_max must be positive");

  // User constraints followed by the six box faces.
  std::vector<LinearConstraint> all(constraints.begin(), constraints.end());
  for (int i = 0; i < kDof; ++i) {
    LinearConstraint lo;
    lo.a[i] = 1.0;
    lo.b = -u_max;
    LinearConstraint hi;
    hi.a[i] = -1.0;
    hi.b = -u_max;
    all.push_back(lo);
    all.push_back(hi);
  }
  for (const auto& c : all) {
    detail::require(c.a.allFinite() && std::isfinite(c.b), "constraints must be finite");
    if (c.a.squaredNorm() == 0.0 && c.b > kQpTolerance) return {u_nom, false};
  }

  QpResult out;
  JointVector x = u_nom;
  ActiveSet active;
  std::vector<bool> is_active(all.size(), false);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Most violated inactive constraint.
    std::size_t p = all.size();
    double worst = -kViolationTol;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (is_active[i] || all[i].a.squaredNorm() == 0.0) continue;
      const double s = all[i].a.dot(x) - all[i].b;
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p == all.size()) {
      out.u = x;
      out.feasible = true;
      return out;
    }

    const JointVector& np = all[p].a;
    double lambda_p = 0.0;
    bool added = false;
    while (!added) {
      if (++iter > kMaxIterations) return {x, false};

      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd r(k);
      JointVector z = np;
      if (k > 0) {
        const Eigen::MatrixXd gram = active.normals.transpose() * active.normals;
        r = gram.ldlt().solve(active.normals.transpose() * np);
        z = np - active.normals * r;
      }

      // Largest dual step that keeps every active multiplier non-negative.
      double t1 = std::numeric_limits<double>::infinity();
      std::size_t drop_pos = 0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r[j] > kDualTol) {
          const double ratio = active.lambda[static_cast<std::size_t>(j)] / r[j];
          if (ratio < t1) {
            t1 = ratio;
            drop_pos = static_cast<std::size_t>(j);
          }
        }
      }

      const bool dependent = z.squaredNorm() <= kDependentTol * np.squaredNorm();
      if (dependent) {
        // p is a combination of the active normals: only the duals can move.
        if (!std::isfinite(t1)) return {x, false};
        for (Eigen::Index j = 0; j < k; ++j) active.lambda[static_cast<std::size_t>(j)] -= t1 * r[j];
        lambda_p += t1;
        is_active[active.index[drop_pos]] = false;
        active.drop(drop_pos);
        continue;
      }

      const double s_p = np.dot(x) - all[p].b;
      const double t2 = -s_p / z.dot(np);
      const double t = std::min(t1, t2);
      x += t * z;
      for (Eigen::Index j = 0; j < k; ++j) active.lambda[static_cast<std::size_t>(j)] -= t * r[j];
      lambda_p += t;

      if (t2 <= t1) {
        active.add(p, np, lambda_p);
        is_active[p] = true;
        added = true;
      } else {
        is_active[active.index[drop_pos]] = false;
        active.drop(drop_pos);
      }
    }
  }
  return {x, false};
}

}  // namespace safebench
