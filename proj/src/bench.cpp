#include "safebench/bench.hpp"

#include "safebench/errors.hpp"
#include "safebench/log_store.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

namespace fs = std::filesystem;

namespace safebench {

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

std::vector<IntensityLevel> sweep_levels(const BenchmarkConfig& config) {
  const auto schedule = schedule_levels(config.attack);
  if (!config.levels.empty()) return config.levels;
  std::vector<IntensityLevel> out;
  for (const auto& entry : schedule.levels) out.push_back(entry.level);
  return out;
}

int worker_count(const BenchmarkConfig& config, std::size_t tasks) {
  int jobs = config.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks));
}

void sort_failures(std::vector<RunFailure>& failures) {
  std::sort(failures.begin(), failures.end(),
            [](const RunFailure& a, const RunFailure& b) { return a.where < b.where; });
}

void sort_metrics(std::vector<RunMetrics>& metrics) {
  std::stable_sort(metrics.begin(), metrics.end(), [](const RunMetrics& a, const RunMetrics& b) {
    return report_order(a.id, b.id);
  });
}

}  // namespace

fs::path run_directory(const fs::path& out_dir, FilterKind filter, AttackFamily attack,
                       IntensityLevel level, std::uint64_t seed) {
  return out_dir / std::string(to_string(filter)) /
         (std::string(to_string(attack)) + "_" + std::string(to_string(level))) /
         std::to_string(seed);
}

RunOutcome execute_run(const BenchmarkConfig& config, const RunRequest& request) {
  const AttackSpec attack = schedule_levels(request.attack).at(request.level);
  const fs::path dir =
      run_directory(config.out_dir, request.filter, request.attack, request.level, request.seed);
  if (!request.overwrite && fs::exists(dir)) {
    throw ConfigError("run directory '" + dir.string() + "' already exists (use --overwrite)");
  }

  const RobotModel model = make_robot(config.robot);
  const auto obstacles = build_scene(config, attack, request.seed);
  SimConfig sim = config.sim;
  sim.seed = request.seed;
  const FilterSpec filter{request.filter, config.params};
  const EpisodeLog log = run_episode(model, obstacles, sim, filter, attack, request.level);

  ensure_directory(dir);
  write_npz(log, dir / "data.npz");
  RunOutcome outcome;
  outcome.metrics = summarize_run(log);
  outcome.directory = dir;
  write_text(dir / "metrics.json", run_metrics_json(outcome.metrics));
  return outcome;
}

SweepResult execute_sweep(const BenchmarkConfig& config, bool overwrite) {
  config.validate();
  std::vector<RunRequest> tasks;
  for (auto filter : config.filters) {
    for (auto level : sweep_levels(config)) {
      for (auto seed : config.seeds) {
        tasks.push_back({filter, seed, config.attack, level, true});
      }
    }
  }
  if (!overwrite) {
    for (const auto& t : tasks) {
      const auto dir = run_directory(config.out_dir, t.filter, t.attack, t.level, t.seed);
      if (fs::exists(dir)) {
        throw ConfigError("run directory '" + dir.string() + "' already exists (use --overwrite)");
      }
    }
  }

  std::vector<std::optional<RunMetrics>> results(tasks.size());
  std::vector<std::optional<RunFailure>> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      try {
        results[i] = execute_run(config, t).metrics;
      } catch (const std::exception& e) {
        failures[i] = RunFailure{
            run_directory(config.out_dir, t.filter, t.attack, t.level, t.seed).string(), e.what()};
      }
    }
  };
  const int n_workers = worker_count(config, tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  SweepResult out;
  for (auto& r : results) {
    if (r) out.metrics.push_back(*r);
  }
  for (auto& f : failures) {
    if (f) out.failures.push_back(*f);
  }
  sort_metrics(out.metrics);
  sort_failures(out.failures);

  ensure_directory(config.out_dir);
  if (!out.metrics.empty()) {
    export_reports(out.metrics, aggregate_seeds(out.metrics), config.out_dir);
  }
  write_text(config.out_dir / "failures.json", failures_json(out.failures));
  return out;
}

ParseResult execute_parse(const std::vector<fs::path>& paths, const fs::path& out_dir) {
  std::vector<fs::path> archives;
  ParseResult out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".npz") {
          archives.push_back(entry.path());
        }
      }
    } else if (fs::is_regular_file(p, ec)) {
      archives.push_back(p);
    } else {
      out.failures.push_back({p.string(), "no such file or directory"});
    }
  }
  std::sort(archives.begin(), archives.end());

  for (const auto& path : archives) {
    try {
      const LoadedLog loaded = read_npz(path);
      out.metrics.push_back(summarize_run(loaded.log));
    } catch (const std::exception& e) {
      out.failures.push_back({path.string(), e.what()});
    }
  }
  sort_metrics(out.metrics);
  sort_failures(out.failures);

  ensure_directory(out_dir);
  write_text(out_dir / "parsed_metrics.csv", metrics_csv(out.metrics));
  write_text(out_dir / "failures.json", failures_json(out.failures));
  return out;
}

std::string failures_json(const std::vector<RunFailure>& failures) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : failures) arr.push_back({{"path", f.where}, {"error", f.error}});
  return nlohmann::json{{"failures", arr}}.dump(2) + "\n";
}

int cmd_run(const BenchmarkConfig& config, const RunRequest& request, std::ostream& out,
            std::ostream& err) {
  try {
    config.validate();
    const RunOutcome r = execute_run(config, request);
    const auto& m = r.metrics;
    out << r.directory.string() << ": collision_steps=" << m.collision_steps
        << " mean_goal_distance=" << format_float(m.mean_goal_distance)
        << " final_goal_distance=" << format_float(m.final_goal_distance)
        << " min_env_distance=" << format_float(m.min_env_distance_overall)
        << " no_solution_steps=" << m.no_solution_steps << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_sweep(const BenchmarkConfig& config, bool overwrite, std::ostream& out,
              std::ostream& err) {
  try {
    const SweepResult r = execute_sweep(config, overwrite);
    out << "completed " << r.metrics.size() << " runs, " << r.failures.size() << " failed; reports in "
        << config.out_dir.string() << "\n";
    for (const auto& f : r.failures) err << "run failed: " << f.where << ": " << f.error << "\n";
    return r.failures.empty() ? kExitOk : kExitRuntime;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_parse(const std::vector<fs::path>& paths, const fs::path& out_dir, std::ostream& out,
              std::ostream& err) {
  if (paths.empty()) {
    err << "error: parse needs at least one archive or directory\n";
    return kExitUsage;
  }
  try {
    const ParseResult r = execute_parse(paths, out_dir);
    out << "parsed " << r.metrics.size() << " archives, " << r.failures.size()
        << " failed; wrote " << (out_dir / "parsed_metrics.csv").string() << "\n";
    for (const auto& f : r.failures) err << "parse failed: " << f.where << ": " << f.error << "\n";
    return r.failures.empty() ? kExitOk : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace safebench
