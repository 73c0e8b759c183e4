// Command-line front end: run, sweep, parse.
#include "safebench/bench.hpp"
#include "safebench/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace safebench;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> robot;
  std::optional<std::int64_t> steps;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "benchmark config file");
  cmd->add_option("--robot", o.robot, "rigid_cluster | planar_arm");
  cmd->add_option("--steps", o.steps, "episode length");
  cmd->add_option("--out", o.out, "output root directory");
}

RobotKind parse_robot(const std::string& s) {
  if (s == "rigid_cluster") return RobotKind::RigidCluster;
  if (s == "planar_arm") return RobotKind::PlanarArm;
  throw ConfigError("unknown robot '" + s + "' (valid: rigid_cluster, planar_arm)");
}

BenchmarkConfig resolve(const CommonOptions& o) {
  BenchmarkConfig c = o.config_path.empty() ? default_config(o.robot ? parse_robot(*o.robot)
                                                                     : RobotKind::RigidCluster)
                                            : load_config(o.config_path);
  if (!o.config_path.empty() && o.robot && parse_robot(*o.robot) != c.robot) {
    throw ConfigError("--robot conflicts with the robot in " + o.config_path);
  }
  if (o.steps) {
    if (*o.steps <= 0) throw ConfigError("--steps must be positive");
    c.sim.steps = *o.steps;
  }
  if (o.out) c.out_dir = *o.out;
  if (o.jobs) c.jobs = *o.jobs;
  c.validate();
  return c;
}

FilterKind filter_or_throw(const std::string& name) {
  auto k = parse_filter_kind(name);
  if (!k) throw ConfigError("unknown filter '" + name + "' (valid: " + valid_filter_names() + ")");
  return *k;
}

AttackFamily attack_or_throw(const std::string& name) {
  auto a = parse_attack_family(name);
  if (!a) throw ConfigError("unknown attack '" + name + "' (valid: none, noise, latency, crowding)");
  return *a;
}

IntensityLevel level_or_throw(const std::string& name) {
  auto l = parse_level(name);
  if (!l) throw ConfigError("unknown level '" + name + "' (valid: nominal, low, medium, high)");
  return *l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"safebench: safe-control filter benchmark"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_filter, run_attack = "none", run_level = "nominal";
  std::uint64_t run_seed = 20;
  bool run_overwrite = false;
  auto* run = app.add_subcommand("run", "run one episode");
  add_common(run, run_opts);
  run->add_option("--filter", run_filter, "safety filter")->required();
  run->add_option("--seed", run_seed, "episode seed");
  run->add_option("--attack", run_attack, "none | noise | latency | crowding");
  run->add_option("--level", run_level, "nominal | low | medium | high");
  run->add_flag("--overwrite", run_overwrite, "replace an existing run directory");

  CommonOptions sweep_opts;
  std::optional<std::string> sweep_attack;
  std::vector<std::string> sweep_filters;
  std::vector<std::uint64_t> sweep_seeds;
  bool sweep_overwrite = false;
  auto* sweep = app.add_subcommand("sweep", "run filters x levels x seeds");
  add_common(sweep, sweep_opts);
  sweep->add_option("--attack", sweep_attack, "attack family to sweep");
  sweep->add_option("--filter", sweep_filters, "restrict to these filters")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seed list")->delimiter(',');
  sweep->add_option("--jobs", sweep_opts.jobs, "worker threads (0: all cores)");
  sweep->add_flag("--overwrite", sweep_overwrite, "replace existing run directories");

  std::vector<std::string> parse_paths;
  std::string parse_out = ".";
  auto* parse = app.add_subcommand("parse", "recompute metrics from archives");
  parse->add_option("paths", parse_paths, "archives or directories")->required();
  parse->add_option("--out", parse_out, "where parsed_metrics.csv is written");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      BenchmarkConfig c = resolve(run_opts);
      RunRequest r;
      r.filter = filter_or_throw(run_filter);
      r.seed = run_seed;
      r.attack = attack_or_throw(run_attack);
      r.level = level_or_throw(run_level);
      r.overwrite = run_overwrite;
      return cmd_run(c, r, std::cout, std::cerr);
    }
    if (*sweep) {
      BenchmarkConfig c = resolve(sweep_opts);
      if (sweep_attack) c.attack = attack_or_throw(*sweep_attack), c.levels.clear();
      if (!sweep_filters.empty()) {
        c.filters.clear();
        for (const auto& f : sweep_filters) c.filters.push_back(filter_or_throw(f));
      }
      if (!sweep_seeds.empty()) c.seeds = sweep_seeds;
      c.validate();
      return cmd_sweep(c, sweep_overwrite, std::cout, std::cerr);
    }
    std::vector<std::filesystem::path> paths(parse_paths.begin(), parse_paths.end());
    return cmd_parse(paths, parse_out, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
