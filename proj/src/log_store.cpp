#include "safebench/log_store.hpp"

#include "safebench/errors.hpp"
#include "safebench/zip_archive.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <set>

namespace safebench {

namespace {

constexpr std::int64_t kSchemaVersion = 1;

// meta_ints layout
enum MetaInt : std::size_t {
  kVersion = 0,
  kSteps,
  kSeed,
  kRobot,
  kFilter,
  kAttack,
  kLevel,
  kDelay,
  kCrowdN,
  kVolumes,
  kObstacles,
  kSelfPairs,
  kMetaIntCount
};

// meta_reals layout
enum MetaReal : std::size_t {
  kDt = 0,
  kUMax,
  kKp,
  kGoal,            // 3 entries
  kStart = kGoal + 3,  // 3 entries
  kSigma = kStart + 3,
  kParams,          // 9 entries, FilterParams field order
  kMetaRealCount = kParams + 9
};

std::string npy_name(const std::string& array) { return array + ".npy"; }

std::vector<std::uint64_t> shape_of(std::initializer_list<std::size_t> dims) {
  std::vector<std::uint64_t> s;
  for (auto d : dims) s.push_back(static_cast<std::uint64_t>(d));
  return s;
}

std::vector<std::int64_t> encode_meta_ints(const EpisodeMeta& m) {
  std::vector<std::int64_t> v(kMetaIntCount, 0);
  v[kVersion] = kSchemaVersion;
  v[kSteps] = m.config.steps;
  v[kSeed] = std::bit_cast<std::int64_t>(m.config.seed);
  v[kRobot] = static_cast<std::int64_t>(m.robot);
  v[kFilter] = static_cast<std::int64_t>(m.filter.kind);
  v[kAttack] = static_cast<std::int64_t>(m.attack.index());
  v[kLevel] = static_cast<std::int64_t>(m.level);
  if (const auto* lat = std::get_if<attack::Latency>(&m.attack)) v[kDelay] = lat->delay;
  if (const auto* c = std::get_if<attack::Crowding>(&m.attack)) {
    v[kCrowdN] = static_cast<std::int64_t>(c->n_obstacles);
  }
  v[kVolumes] = static_cast<std::int64_t>(m.num_volumes);
  v[kObstacles] = static_cast<std::int64_t>(m.num_obstacles);
  v[kSelfPairs] = static_cast<std::int64_t>(m.num_self_pairs);
  return v;
}

std::vector<double> encode_meta_reals(const EpisodeMeta& m) {
  std::vector<double> v(kMetaRealCount, 0.0);
  v[kDt] = m.config.dt;
  v[kUMax] = m.config.u_max;
  v[kKp] = m.config.kp;
  for (int i = 0; i < 3; ++i) {
    v[kGoal + static_cast<std::size_t>(i)] = m.config.goal[i];
    v[kStart + static_cast<std::size_t>(i)] = m.config.start[i];
  }
  if (const auto* n = std::get_if<attack::Noise>(&m.attack)) v[kSigma] = n->sigma;
  const FilterParams& p = m.filter.params;
  const double params[] = {p.d_margin, p.alpha,   p.eta,        p.lambda_sss, p.k_rep,
                           p.rho0,     p.k_slide, p.eps_robust, p.u_max};
  std::copy(std::begin(params), std::end(params), v.begin() + kParams);
  return v;
}

template <typename E>
E checked_enum(std::int64_t raw, std::int64_t max, const char* what) {
  if (raw < 0 || raw > max) {
    throw SchemaError(std::string("meta_ints: ") + what + " code " + std::to_string(raw) +
                      " out of range");
  }
  return static_cast<E>(raw);
}

std::size_t checked_size(std::int64_t raw, const char* what) {
  if (raw < 0) throw SchemaError(std::string("meta_ints: negative ") + what);
  return static_cast<std::size_t>(raw);
}

EpisodeMeta decode_meta(const std::vector<std::int64_t>& ints, const std::vector<double>& reals) {
  if (ints.size() < kMetaIntCount || reals.size() < kMetaRealCount) {
    throw SchemaError("metadata arrays are too short");
  }
  if (ints[kVersion] != kSchemaVersion) {
    throw SchemaError("unsupported log schema version " + std::to_string(ints[kVersion]));
  }
  EpisodeMeta m;
  m.config.steps = ints[kSteps];
  m.config.seed = std::bit_cast<std::uint64_t>(ints[kSeed]);
  m.robot = checked_enum<RobotKind>(ints[kRobot], 1, "robot");
  m.filter.kind = checked_enum<FilterKind>(ints[kFilter], 7, "filter");
  switch (checked_enum<AttackFamily>(ints[kAttack], 3, "attack")) {
    case AttackFamily::None:
      m.attack = attack::Nominal{};
      break;
    case AttackFamily::Noise:
      m.attack = attack::Noise{reals[kSigma]};
      break;
    case AttackFamily::Latency:
      m.attack = attack::Latency{ints[kDelay]};
      break;
    case AttackFamily::Crowding:
      m.attack = attack::Crowding{checked_size(ints[kCrowdN], "crowding count")};
      break;
  }
  m.level = checked_enum<IntensityLevel>(ints[kLevel], 3, "level");
  m.num_volumes = checked_size(ints[kVolumes], "volume count");
  m.num_obstacles = checked_size(ints[kObstacles], "obstacle count");
  m.num_self_pairs = checked_size(ints[kSelfPairs], "self pair count");

  m.config.dt = reals[kDt];
  m.config.u_max = reals[kUMax];
  m.config.kp = reals[kKp];
  for (int i = 0; i < 3; ++i) {
    m.config.goal[i] = reals[kGoal + static_cast<std::size_t>(i)];
    m.config.start[i] = reals[kStart + static_cast<std::size_t>(i)];
  }
  FilterParams& p = m.filter.params;
  double* fields[] = {&p.d_margin, &p.alpha,   &p.eta,        &p.lambda_sss, &p.k_rep,
                      &p.rho0,     &p.k_slide, &p.eps_robust, &p.u_max};
  for (std::size_t i = 0; i < std::size(fields); ++i) *fields[i] = reals[kParams + i];
  return m;
}

void expect_shape(const std::string& name, const npy::Array& a,
                  const std::vector<std::uint64_t>& shape) {
  if (a.descriptor.shape != shape) {
    std::string got, want;
    for (auto d : a.descriptor.shape) got += std::to_string(d) + ",";
    for (auto d : shape) want += std::to_string(d) + ",";
    throw SchemaError("array '" + name + "' has shape (" + got + ") but metadata implies (" +
                      want + ")");
  }
}

nlohmann::json mean_std_json(const MeanStd& m) {
  return nlohmann::json{{"mean", m.mean}, {"std", m.std}};
}

}  // namespace

const std::vector<std::string>& required_log_arrays() {
  static const std::vector<std::string> names{
      "dist_robot_to_env", "dist_goal_arm",       "q_trace",   "u_nominal_trace",
      "u_safe_trace",      "filter_status_trace", "meta_ints", "meta_reals"};
  return names;
}

std::vector<std::uint8_t> encode_npz(const EpisodeLog& log) {
  log.validate_shape();
  const std::size_t t = log.steps();
  const std::size_t v = log.meta.num_volumes;
  const std::size_t o = log.meta.num_obstacles;
  const auto ints = encode_meta_ints(log.meta);
  const auto reals = encode_meta_reals(log.meta);

  using npy::Array;
  const std::pair<std::string, Array> arrays[] = {
      {"dist_robot_to_env", Array::from_doubles(log.dist_robot_to_env, shape_of({t, v, o}))},
      {"perceived_dist_robot_to_env",
       Array::from_doubles(log.perceived_dist_robot_to_env, shape_of({t, v, o}))},
      {"dist_goal_arm", Array::from_doubles(log.dist_goal_arm, shape_of({t}))},
      {"q_trace", Array::from_doubles(log.q_trace, shape_of({t, kDof}))},
      {"u_nominal_trace", Array::from_doubles(log.u_nominal_trace, shape_of({t, kDof}))},
      {"u_safe_trace", Array::from_doubles(log.u_safe_trace, shape_of({t, kDof}))},
      {"filter_status_trace", Array::from_int32s(log.filter_status_trace, shape_of({t}))},
      {"self_dist_trace",
       Array::from_doubles(log.self_dist_trace, shape_of({t, log.meta.num_self_pairs}))},
      {"meta_ints", Array::from_int64s(ints, shape_of({ints.size()}))},
      {"meta_reals", Array::from_doubles(reals, shape_of({reals.size()}))},
  };

  std::vector<zip::Member> members;
  for (const auto& [name, array] : arrays) members.push_back({npy_name(name), npy::encode(array)});
  return zip::write_stored(members);
}

void write_npz(const EpisodeLog& log, const std::filesystem::path& path) {
  zip::write_file(path, encode_npz(log));
}

LoadedLog decode_npz(std::span<const std::uint8_t> archive) {
  LoadedLog out;
  std::map<std::string, npy::Array> arrays;
  for (auto& member : zip::read_all(archive)) {
    if (member.name.size() < 4 || member.name.substr(member.name.size() - 4) != ".npy") {
      out.warnings.push_back("ignored non-array member '" + member.name + "'");
      continue;
    }
    const std::string name = member.name.substr(0, member.name.size() - 4);
    try {
      arrays[name] = npy::decode(member.data);
    } catch (const npy::Error& e) {
      throw npy::Error(e.kind(), e.position(), "member '" + member.name + "': " + e.what());
    }
  }

  std::vector<std::string> missing;
  for (const auto& name : required_log_arrays()) {
    if (!arrays.contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw SchemaError("archive is missing required arrays: " + list);
  }
  static const std::set<std::string> known{
      "dist_robot_to_env", "perceived_dist_robot_to_env", "dist_goal_arm", "q_trace",
      "u_nominal_trace",   "u_safe_trace",                "filter_status_trace",
      "self_dist_trace",   "meta_ints",                   "meta_reals"};
  for (const auto& [name, array] : arrays) {
    if (!known.contains(name)) out.warnings.push_back("ignored unknown array '" + name + "'");
  }

  try {
    EpisodeLog& log = out.log;
    log.meta = decode_meta(arrays.at("meta_ints").to_int64s(), arrays.at("meta_reals").to_doubles());
    const std::size_t t = checked_size(log.meta.config.steps, "step count");
    const std::size_t v = log.meta.num_volumes;
    const std::size_t o = log.meta.num_obstacles;

    expect_shape("dist_robot_to_env", arrays.at("dist_robot_to_env"), shape_of({t, v, o}));
    log.dist_robot_to_env = arrays.at("dist_robot_to_env").to_doubles();
    if (arrays.contains("perceived_dist_robot_to_env")) {
      expect_shape("perceived_dist_robot_to_env", arrays.at("perceived_dist_robot_to_env"),
                   shape_of({t, v, o}));
      log.perceived_dist_robot_to_env = arrays.at("perceived_dist_robot_to_env").to_doubles();
    } else {
      log.perceived_dist_robot_to_env = log.dist_robot_to_env;
      out.warnings.push_back("perceived_dist_robot_to_env absent; using the true distances");
    }
    expect_shape("dist_goal_arm", arrays.at("dist_goal_arm"), shape_of({t}));
    log.dist_goal_arm = arrays.at("dist_goal_arm").to_doubles();
    for (const char* name : {"q_trace", "u_nominal_trace", "u_safe_trace"}) {
      expect_shape(name, arrays.at(name), shape_of({t, kDof}));
    }
    log.q_trace = arrays.at("q_trace").to_doubles();
    log.u_nominal_trace = arrays.at("u_nominal_trace").to_doubles();
    log.u_safe_trace = arrays.at("u_safe_trace").to_doubles();
    expect_shape("filter_status_trace", arrays.at("filter_status_trace"), shape_of({t}));
    for (auto s : arrays.at("filter_status_trace").to_int64s()) {
      log.filter_status_trace.push_back(static_cast<std::int32_t>(s));
    }
    if (arrays.contains("self_dist_trace")) {
      expect_shape("self_dist_trace", arrays.at("self_dist_trace"),
                   shape_of({t, log.meta.num_self_pairs}));
      log.self_dist_trace = arrays.at("self_dist_trace").to_doubles();
    } else {
      log.meta.num_self_pairs = 0;
    }
    log.validate_shape();
  } catch (const ParseError& e) {
    throw SchemaError(e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const SchemaError*>(&e) != nullptr) throw;
    throw SchemaError(e.what());
  }
  return out;
}

LoadedLog read_npz(const std::filesystem::path& path) {
  const auto bytes = zip::read_file(path);
  return decode_npz(bytes);
}

ArchiveManifest read_manifest(std::span<const std::uint8_t> archive) {
  ArchiveManifest manifest;
  const auto members = zip::read_all(archive);
  const auto entries = zip::list(archive);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& name = members[i].name;
    if (name.size() < 4 || name.substr(name.size() - 4) != ".npy") continue;
    ManifestEntry e;
    e.descriptor = npy::parse_header(members[i].data).descriptor;
    e.offset = entries[i].data_offset;
    e.size = entries[i].uncompressed_size;
    manifest[name.substr(0, name.size() - 4)] = e;
  }
  return manifest;
}

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string metrics_csv(std::span<const RunMetrics> metrics) {
  std::vector<const RunMetrics*> rows;
  for (const auto& m : metrics) rows.push_back(&m);
  std::stable_sort(rows.begin(), rows.end(), [](const RunMetrics* a, const RunMetrics* b) {
    return report_order(a->id, b->id);
  });
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const RunMetrics* m : rows) {
    out += std::string(to_string(m->id.filter)) + "," + std::string(to_string(m->id.attack)) +
           "," + std::string(to_string(m->id.level)) + "," + std::to_string(m->id.seed) + "," +
           std::to_string(m->id.steps) + "," + std::to_string(m->collision_steps) + "," +
           format_float(m->mean_goal_distance) + "," + format_float(m->final_goal_distance) +
           "," + format_float(m->min_env_distance_overall) + "," +
           std::to_string(m->no_solution_steps) + "\n";
  }
  return out;
}

std::string summary_json(const AggregateSummary& summary) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : summary.groups) {
    groups.push_back({{"filter", to_string(g.filter)},
                      {"attack", to_string(g.attack)},
                      {"level", to_string(g.level)},
                      {"seeds", g.seeds},
                      {"n", g.seeds.size()},
                      {"collision_steps", mean_std_json(g.collision_steps)},
                      {"mean_goal_distance", mean_std_json(g.mean_goal_distance)},
                      {"final_goal_distance", mean_std_json(g.final_goal_distance)},
                      {"min_env_distance", mean_std_json(g.min_env_distance)},
                      {"no_solution_steps", mean_std_json(g.no_solution_steps)}});
  }
  nlohmann::json doc{{"schema", "safebench-summary/1"}, {"groups", groups}};
  return doc.dump(2) + "\n";
}

std::string plot_data_csv(const AggregateSummary& summary) {
  std::string out = "level,filter,metric,value\n";
  for (const auto& g : summary.groups) {
    const std::pair<const char*, double> rows[] = {
        {"collision_steps", g.collision_steps.mean},
        {"mean_goal_distance", g.mean_goal_distance.mean},
        {"final_goal_distance", g.final_goal_distance.mean},
        {"min_env_distance", g.min_env_distance.mean},
        {"no_solution_steps", g.no_solution_steps.mean},
    };
    for (const auto& [metric, value] : rows) {
      out += std::string(to_string(g.level)) + "," + std::string(to_string(g.filter)) + "," +
             metric + "," + format_float(value) + "\n";
    }
  }
  return out;
}

std::string run_metrics_json(const RunMetrics& m) {
  nlohmann::json doc{{"filter", to_string(m.id.filter)},
                     {"attack", to_string(m.id.attack)},
                     {"level", to_string(m.id.level)},
                     {"seed", m.id.seed},
                     {"robot", m.id.robot == RobotKind::PlanarArm ? "planar_arm" : "rigid_cluster"},
                     {"steps", m.id.steps},
                     {"collision_steps", m.collision_steps},
                     {"mean_goal_distance", m.mean_goal_distance},
                     {"final_goal_distance", m.final_goal_distance},
                     {"min_env_distance", m.min_env_distance_overall},
                     {"no_solution_steps", m.no_solution_steps}};
  return doc.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void export_reports(std::span<const RunMetrics> metrics, const AggregateSummary& summary,
                    const std::filesystem::path& out_dir) {
  detail::require(!metrics.empty(), "export_reports needs at least one run");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  write_text(out_dir / "parsed_metrics.csv", metrics_csv(metrics));
  write_text(out_dir / "summary.json", summary_json(summary));
  write_text(out_dir / "plot_data.csv", plot_data_csv(summary));
}

}  // namespace safebench
