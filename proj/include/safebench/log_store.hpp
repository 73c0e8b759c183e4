#pragma once

#include "safebench/metrics.hpp"
#include "safebench/npy.hpp"
#include "safebench/sim_core.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace safebench {

/// Required arrays were absent or had inconsistent shapes.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  npy::Descriptor descriptor;
  std::uint64_t offset = 0;  // start of the member inside the archive
  std::uint64_t size = 0;    // uncompressed member size
};

using ArchiveManifest = std::map<std::string, ManifestEntry>;

/// Array names an episode archive must contain.
const std::vector<std::string>& required_log_arrays();

/// Serialised archive bytes (what write_npz puts on disk).
std::vector<std::uint8_t> encode_npz(const EpisodeLog& log);

void write_npz(const EpisodeLog& log, const std::filesystem::path& path);

struct LoadedLog {
  EpisodeLog log;
  std::vector<std::string> warnings;
};

LoadedLog decode_npz(std::span<const std::uint8_t> archive);
LoadedLog read_npz(const std::filesystem::path& path);

/// Describes each .npy member of an archive without decoding payloads.
ArchiveManifest read_manifest(std::span<const std::uint8_t> archive);

inline constexpr const char* kMetricsCsvHeader =
    "filter,attack,level,seed,steps,collision_steps,mean_goal_distance,final_goal_distance,"
    "min_env_distance,no_solution_steps";

/// Six significant digits, printf %.6g.
std::string format_float(double value);

/// parsed_metrics.csv contents; rows sorted by (filter, attack, level, seed).
std::string metrics_csv(std::span<const RunMetrics> metrics);
std::string summary_json(const AggregateSummary& summary);
std::string plot_data_csv(const AggregateSummary& summary);
std::string run_metrics_json(const RunMetrics& metrics);

/// Writes parsed_metrics.csv, summary.json and plot_data.csv into `out_dir`.
void export_reports(std::span<const RunMetrics> metrics, const AggregateSummary& summary,
                    const std::filesystem::path& out_dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace safebench
