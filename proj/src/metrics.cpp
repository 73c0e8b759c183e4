#include "safebench/metrics.hpp"

#include "safebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace safebench {

bool report_order(const RunIdentity& a, const RunIdentity& b) {
  const auto key = [](const RunIdentity& r) {
    return std::make_tuple(std::string(to_string(r.filter)), std::string(to_string(r.attack)),
                           static_cast<int>(r.level), r.seed);
  };
  return key(a) < key(b);
}

std::vector<double> min_env_trace(const EpisodeLog& log) {
  const std::size_t t = log.steps();
  const std::size_t block = log.pairs_per_step();
  if (log.dist_robot_to_env.size() != t * block) {
    throw ParseError("dist_robot_to_env has " + std::to_string(log.dist_robot_to_env.size()) +
                     " entries, expected " + std::to_string(t) + " x " + std::to_string(block));
  }
  std::vector<double> out(t, std::numeric_limits<double>::infinity());
  if (block == 0) return out;
  for (std::size_t k = 0; k < t; ++k) {
    const auto first = log.dist_robot_to_env.begin() + static_cast<std::ptrdiff_t>(k * block);
    out[k] = *std::min_element(first, first + static_cast<std::ptrdiff_t>(block));
  }
  return out;
}

std::int64_t collision_steps(std::span<const double> trace) {
  return std::count_if(trace.begin(), trace.end(), [](double d) { return d < 0.0; });
}

double mean_goal_distance(std::span<const double> trace) {
  detail::require(!trace.empty(), "mean_goal_distance of an empty trace");
  // Neumaier summation.
  double sum = 0.0;
  double comp = 0.0;
  for (double x : trace) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) / static_cast<double>(trace.size());
}

RunMetrics summarize_run(const EpisodeLog& log) {
  log.validate_shape();
  detail::require(log.steps() >= 1, "cannot summarize an empty episode");

  const auto trace = min_env_trace(log);
  RunMetrics m;
  m.id.filter = log.meta.filter.kind;
  m.id.attack = family_of(log.meta.attack);
  m.id.level = log.meta.level;
  m.id.seed = log.meta.config.seed;
  m.id.robot = log.meta.robot;
  m.id.steps = log.meta.config.steps;
  m.collision_steps = collision_steps(trace);
  m.mean_goal_distance = mean_goal_distance(log.dist_goal_arm);
  m.final_goal_distance = log.dist_goal_arm.back();
  m.min_env_distance_overall = *std::min_element(trace.begin(), trace.end());
  m.no_solution_steps = std::count(log.filter_status_trace.begin(), log.filter_status_trace.end(),
                                   static_cast<std::int32_t>(FilterStatus::NoSolution));
  return m;
}

MeanStd mean_and_sample_std(std::span<const double> values) {
  detail::require(!values.empty(), "cannot aggregate an empty group");
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    return {values.front(), 0.0};
  }
  // Welford's update.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : values) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  MeanStd out;
  out.mean = mean;
  out.std = n > 1 ? std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1))) : 0.0;
  return out;
}

AggregateSummary aggregate_seeds(std::span<const RunMetrics> runs) {
  detail::require(!runs.empty(), "aggregate_seeds needs at least one run");

  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::vector<const RunMetrics*>> groups;
  for (const auto& r : runs) {
    groups[{std::string(to_string(r.id.filter)), std::string(to_string(r.id.attack)),
            static_cast<int>(r.id.level)}]
        .push_back(&r);
  }

  AggregateSummary out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const RunMetrics* a, const RunMetrics* b) {
      return a->id.seed < b->id.seed;
    });
    GroupSummary g;
    g.filter = members.front()->id.filter;
    g.attack = members.front()->id.attack;
    g.level = members.front()->id.level;

    std::vector<double> coll, mean_goal, final_goal, min_env, no_sol;
    for (const RunMetrics* m : members) {
      g.seeds.push_back(m->id.seed);
      coll.push_back(static_cast<double>(m->collision_steps));
      mean_goal.push_back(m->mean_goal_distance);
      final_goal.push_back(m->final_goal_distance);
      min_env.push_back(m->min_env_distance_overall);
      no_sol.push_back(static_cast<double>(m->no_solution_steps));
    }
    g.collision_steps = mean_and_sample_std(coll);
    g.mean_goal_distance = mean_and_sample_std(mean_goal);
    g.final_goal_distance = mean_and_sample_std(final_goal);
    g.min_env_distance = mean_and_sample_std(min_env);
    g.no_solution_steps = mean_and_sample_std(no_sol);
    out.groups.push_back(std::move(g));
  }
  return out;
}

}  // namespace safebench
