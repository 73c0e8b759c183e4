#pragma once

#include "safebench/world_model.hpp"

#include <span>

namespace safebench {

/// Half-space a . u >= b.
struct LinearConstraint {
  JointVector a = JointVector::Zero();
  double b = 0.0;
};

struct QpResult {
  JointVector u = JointVector::Zero();
  bool feasible = false;
};

/// Feasibility tolerance shared by the solver and its callers.
inline constexpr double kQpTolerance = 1e-9;

/// Euclidean projection of `u_nom` onto {u : a_k . u >= b_k, |u_i| <= u_max}.
///
/// Dual active-set method (Goldfarb-Idnani) specialised to an identity
/// Hessian. The box is handled as six ordinary half-spaces. When the
/// constraints are incompatible `feasible` is false and `u` is unspecified.
QpResult solve_projection_qp(const JointVector& u_nom, std::span<const LinearConstraint> constraints,
                             double u_max);

}  // namespace safebench
