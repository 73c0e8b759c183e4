#pragma once

#include "safebench/config.hpp"
#include "safebench/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace safebench {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

struct RunRequest {
  FilterKind filter = FilterKind::CBF;
  std::uint64_t seed = 20;
  AttackFamily attack = AttackFamily::None;
  IntensityLevel level = IntensityLevel::Nominal;
  bool overwrite = false;
};

/// <out>/<filter>/<attack>_<level>/<seed>
std::filesystem::path run_directory(const std::filesystem::path& out_dir, FilterKind filter,
                                    AttackFamily attack, IntensityLevel level, std::uint64_t seed);

struct RunOutcome {
  RunMetrics metrics;
  std::filesystem::path directory;
};

/// Runs one episode and writes data.npz and metrics.json. Throws ConfigError
/// when the run directory exists and overwrite is off.
RunOutcome execute_run(const BenchmarkConfig& config, const RunRequest& request);

struct RunFailure {
  std::string where;  // run directory or archive path
  std::string error;
};

struct SweepResult {
  std::vector<RunMetrics> metrics;  // report order
  std::vector<RunFailure> failures;
};

/// Runs filter x level x seed on a worker pool, then writes parsed_metrics.csv,
/// summary.json, plot_data.csv and failures.json at the sweep root. Report
/// bytes do not depend on the worker count.
SweepResult execute_sweep(const BenchmarkConfig& config, bool overwrite);

struct ParseResult {
  std::vector<RunMetrics> metrics;  // report order
  std::vector<RunFailure> failures;
};

/// Recomputes metrics from archives alone. Directories are searched
/// recursively for *.npz files. Writes parsed_metrics.csv and failures.json
/// into `out_dir`.
ParseResult execute_parse(const std::vector<std::filesystem::path>& paths,
                          const std::filesystem::path& out_dir);

std::string failures_json(const std::vector<RunFailure>& failures);

// Subcommand wrappers: report diagnostics on `err` and return an ExitCode.
int cmd_run(const BenchmarkConfig& config, const RunRequest& request, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const BenchmarkConfig& config, bool overwrite, std::ostream& out, std::ostream& err);
int cmd_parse(const std::vector<std::filesystem::path>& paths, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);

}  // namespace safebench
