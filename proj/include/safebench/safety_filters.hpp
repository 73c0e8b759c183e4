#pragma once

#include "safebench/qp_solver.hpp"
#include "safebench/world_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace safebench {

enum class FilterKind : std::uint8_t { None = 0, PFM, SSA, RSSA, SSS, RSSS, CBF, SMA };

/// The six filters the benchmark compares (None excluded).
inline constexpr FilterKind kBenchmarkFilters[] = {FilterKind::RSSA, FilterKind::RSSS,
                                                   FilterKind::SSA,  FilterKind::CBF,
                                                   FilterKind::PFM,  FilterKind::SMA};

std::string_view to_string(FilterKind kind);
/// Case-insensitive; accepts "none" as well as the six filter names.
std::optional<FilterKind> parse_filter_kind(std::string_view name);
/// Comma-separated list of every accepted name, for diagnostics.
std::string valid_filter_names();

bool is_qp_filter(FilterKind kind);
bool is_robust(FilterKind kind);

struct FilterParams {
  double d_margin = 0.05;    // m
  double alpha = 5.0;        // 1/s, CBF class-K gain
  double eta = 0.1;          // m/s, SSA decay rate
  double lambda_sss = 5.0;   // 1/s
  double k_rep = 0.5;        // PFM repulsion gain
  double rho0 = 0.3;         // m, PFM influence radius
  double k_slide = 0.5;      // m/s
  double eps_robust = 0.05;  // m
  double u_max = 1.0;

  void validate() const;
  bool operator==(const FilterParams&) const = default;
};

enum class FilterStatus : std::uint8_t { Inactive = 0, Active = 1, NoSolution = 2 };

std::string_view to_string(FilterStatus status);

struct FilterOutput {
  JointVector u_safe = JointVector::Zero();
  FilterStatus status = FilterStatus::Inactive;
  std::size_t active_pairs = 0;
  /// Pairs whose activation fired but whose gradient was zero.
  std::size_t degenerate_pairs = 0;
};

struct ConstraintSet {
  std::vector<LinearConstraint> constraints;
  /// Pair index (row-major into PairwiseInfo) that produced each constraint.
  std::vector<std::size_t> pair_index;
  std::size_t degenerate_pairs = 0;
};

/// Linear constraints for the QP family (SSA, RSSA, SSS, RSSS, CBF).
ConstraintSet build_constraints(FilterKind kind, const FilterParams& params,
                                const PairwiseInfo& info);

/// Runs the filter on the perceived pairwise info.
FilterOutput apply_filter(FilterKind kind, const FilterParams& params, const JointVector& u_nom,
                          const PairwiseInfo& info);

/// Component-wise clamp to [-u_max, u_max].
JointVector clamp_control(const JointVector& u, double u_max);

/// Sum of PFM repulsive terms before clamping (exposed for property tests).
JointVector pfm_repulsion(const FilterParams& params, const PairwiseInfo& info,
                          std::size_t* pairs_in_range = nullptr);

/// SMA control before the final clamp (exposed for property tests). Returns
/// nullopt when the filter is inactive.
std::optional<JointVector> sma_unclamped(const FilterParams& params, const JointVector& u_nom,
                                         const PairwiseInfo& info,
                                         std::size_t* critical_pair = nullptr);

}  // namespace safebench
