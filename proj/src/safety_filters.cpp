#include "safebench/safety_filters.hpp"

#include "safebench/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace safebench {

using detail::require;

namespace {

constexpr std::array<std::pair<FilterKind, std::string_view>, 8> kNames{{
    {FilterKind::None, "None"},
    {FilterKind::PFM, "PFM"},
    {FilterKind::SSA, "SSA"},
    {FilterKind::RSSA, "RSSA"},
    {FilterKind::SSS, "SSS"},
    {FilterKind::RSSS, "RSSS"},
    {FilterKind::CBF, "CBF"},
    {FilterKind::SMA, "SMA"},
}};

constexpr double kPfmMinDistance = 1e-4;

void require_finite(const PairwiseInfo& info) {
  require(info.grad.size() == info.d.size(), "pairwise info has mismatched d/grad sizes");
  require(info.d.size() == info.num_volumes * info.num_obstacles,
          "pairwise info size does not match its dimensions");
  for (std::size_t k = 0; k < info.d.size(); ++k) {
    require(std::isfinite(info.d[k]) && info.grad[k].allFinite(),
            "perceived pairwise info contains non-finite values");
  }
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) {
  for (const auto& [k, canonical] : kNames) {
    if (canonical.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(name[i])) !=
          std::toupper(static_cast<unsigned char>(canonical[i]))) {
        same = false;
        break;
      }
    }
    if (same) return k;
  }
  return std::nullopt;
}

std::string valid_filter_names() {
  std::string out;
  for (const auto& [k, name] : kNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

bool is_qp_filter(FilterKind kind) {
  switch (kind) {
    case FilterKind::SSA:
    case FilterKind::RSSA:
    case FilterKind::SSS:
    case FilterKind::RSSS:
    case FilterKind::CBF:
      return true;
    default:
      return false;
  }
}

bool is_robust(FilterKind kind) { return kind == FilterKind::RSSA || kind == FilterKind::RSSS; }

void FilterParams::validate() const {
  for (double v : {d_margin, alpha, eta, lambda_sss, k_rep, rho0, k_slide, eps_robust, u_max}) {
    require(std::isfinite(v) && v > 0.0, "filter parameters must be positive and finite");
  }
}

std::string_view to_string(FilterStatus status) {
  switch (status) {
    case FilterStatus::Inactive:
      return "Inactive";
    case FilterStatus::Active:
      return "Active";
    case FilterStatus::NoSolution:
      return "NoSolution";
  }
  return "?";
}

JointVector clamp_control(const JointVector& u, double u_max) {
  return u.cwiseMax(-u_max).cwiseMin(u_max);
}

ConstraintSet build_constraints(FilterKind kind, const FilterParams& params,
                                const PairwiseInfo& info) {
  require(is_qp_filter(kind), "build_constraints: " + std::string(to_string(kind)) +
                                  " is not a constraint-based filter");
  const double tighten = is_robust(kind) ? params.eps_robust : 0.0;

  ConstraintSet out;
  for (std::size_t k = 0; k < info.d.size(); ++k) {
    const double d_eff = info.d[k] - tighten;
    const JointVector& g = info.grad[k];

    bool activated = false;
    double b = 0.0;
    switch (kind) {
      case FilterKind::CBF:
        activated = true;
        b = -params.alpha * (d_eff - params.d_margin);
        break;
      case FilterKind::SSA:
      case FilterKind::RSSA:
        // Safety index phi = d_margin - d_eff; constrain when phi >= 0.
        activated = d_eff <= params.d_margin;
        b = params.eta;
        break;
      case FilterKind::SSS:
      case FilterKind::RSSS:
        activated = d_eff <= 2.0 * params.d_margin;
        b = -params.lambda_sss * d_eff;
        break;
      default:
        break;
    }
    if (!activated) continue;
    if (g.squaredNorm() == 0.0) {
      ++out.degenerate_pairs;
      continue;
    }
    out.constraints.push_back({g, b});
    out.pair_index.push_back(k);
  }
  return out;
}

JointVector pfm_repulsion(const FilterParams& params, const PairwiseInfo& info,
                          std::size_t* pairs_in_range) {
  JointVector total = JointVector::Zero();
  std::size_t count = 0;
  for (std::size_t k = 0; k < info.d.size(); ++k) {
    if (!(info.d[k] < params.rho0)) continue;
    ++count;
    const double d = std::max(info.d[k], kPfmMinDistance);
    const double magnitude = params.k_rep * (1.0 / d - 1.0 / params.rho0) / (d * d);
    total += magnitude * info.grad[k];
  }
  if (pairs_in_range != nullptr) *pairs_in_range = count;
  return total;
}

std::optional<JointVector> sma_unclamped(const FilterParams& params, const JointVector& u_nom,
                                         const PairwiseInfo& info, std::size_t* critical_pair) {
  if (info.d.empty()) return std::nullopt;
  // Lowest index wins ties, which min_element already guarantees.
  const auto it = std::min_element(info.d.begin(), info.d.end());
  if (*it >= params.d_margin) return std::nullopt;
  const auto k = static_cast<std::size_t>(it - info.d.begin());
  if (critical_pair != nullptr) *critical_pair = k;

  const JointVector& g = info.grad[k];
  const double g2 = g.squaredNorm();
  if (g2 == 0.0) return JointVector::Zero();
  const double approach = std::min(0.0, g.dot(u_nom));
  return JointVector(u_nom - (approach / g2) * g + params.k_slide * g / std::sqrt(g2));
}

FilterOutput apply_filter(FilterKind kind, const FilterParams& params, const JointVector& u_nom,
                          const PairwiseInfo& info) {
  require(u_nom.allFinite(), "nominal control must be finite");
  require_finite(info);

  FilterOutput out;
  out.u_safe = u_nom;

  switch (kind) {
    case FilterKind::None:
      return out;

    case FilterKind::PFM: {
      std::size_t in_range = 0;
      const JointVector rep = pfm_repulsion(params, info, &in_range);
      if (in_range == 0) return out;
      out.u_safe = clamp_control(u_nom + rep, params.u_max);
      out.status = FilterStatus::Active;
      out.active_pairs = in_range;
      return out;
    }

    case FilterKind::SMA: {
      const auto u = sma_unclamped(params, u_nom, info);
      if (!u) return out;
      out.u_safe = clamp_control(*u, params.u_max);
      out.status = FilterStatus::Active;
      out.active_pairs = 1;
      return out;
    }

    default:
      break;
  }

  const ConstraintSet set = build_constraints(kind, params, info);
  out.degenerate_pairs = set.degenerate_pairs;
  if (set.constraints.empty()) return out;

  out.active_pairs = set.constraints.size();
  const QpResult qp = solve_projection_qp(u_nom, set.constraints, params.u_max);
  if (!qp.feasible) {
    out.u_safe.setZero();
    out.status = FilterStatus::NoSolution;
    return out;
  }
  out.u_safe = clamp_control(qp.u, params.u_max);
  out.status = (out.u_safe == u_nom) ? FilterStatus::Inactive : FilterStatus::Active;
  return out;
}

}  // namespace safebench
