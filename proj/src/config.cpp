#include "safebench/config.hpp"

#include "safebench/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace safebench {

namespace {

constexpr std::string_view kHeader = "safebench-config";
constexpr int kFormatVersion = 1;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void operator()(const std::string& message) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + message);
  }

 private:
  int line_;
};

double parse_double(const std::string& s, const LineError& fail) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail("expected a number, got '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const LineError& fail) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail("expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const LineError& fail) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail("expected a non-negative integer, got '" + s + "'");
  return v;
}

Vec3 parse_vec3(const std::string& s, const LineError& fail) {
  const auto w = words(s);
  if (w.size() != 3) fail("expected three numbers");
  return {parse_double(w[0], fail), parse_double(w[1], fail), parse_double(w[2], fail)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const Eigen::Ref<const Eigen::Vector3d>& v) {
  return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]);
}

double bounding_radius(const RobotModel& model) {
  double r = 0.0;
  for (const auto& v : model.volumes()) r = std::max(r, v.offset.norm() + v.radius);
  return r;
}

}  // namespace

std::string_view to_string(RobotKind kind) {
  return kind == RobotKind::PlanarArm ? "planar_arm" : "rigid_cluster";
}

RobotModel make_robot(RobotKind kind) {
  return kind == RobotKind::PlanarArm ? RobotModel::default_arm() : RobotModel::default_cluster();
}

BenchmarkConfig default_config(RobotKind robot) {
  BenchmarkConfig c;
  c.robot = robot;
  c.filters.assign(std::begin(kBenchmarkFilters), std::end(kBenchmarkFilters));
  if (robot == RobotKind::RigidCluster) {
    // The arm volume sits 0.15 m to the side of the cluster origin.
    c.sim.start = JointVector(-0.8, 0.0, 0.0);
    c.sim.goal = Vec3(0.8, 0.15, 0.0);
    c.scene.workspace = {Vec3(-0.45, -0.45, -0.25), Vec3(0.45, 0.45, 0.25)};
  } else {
    c.sim.start = JointVector(0.0, 0.0, 0.0);
    c.sim.goal = Vec3(-0.3, 0.6, 0.0);
    c.scene.workspace = {Vec3(-0.9, -0.2, 0.0), Vec3(0.9, 0.9, 0.0)};
  }
  return c;
}

void BenchmarkConfig::validate() const {
  sim.validate();
  params.validate();
  if (seeds.empty()) throw ConfigError("seed list must not be empty");
  if (filters.empty()) throw ConfigError("filter list must not be empty");
  if (scene.kind == SceneKind::Crowding && scene.n_obstacles == 0) {
    throw ConfigError("crowding scene needs at least one obstacle");
  }
  if ((scene.workspace.hi - scene.workspace.lo).minCoeff() < 0.0) {
    throw ConfigError("workspace_min must not exceed workspace_max");
  }
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  const auto schedule = schedule_levels(attack);
  for (auto level : levels) (void)schedule.at(level);
}

BenchmarkConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  std::map<std::string, int> seen;

  std::string robot_name = "rigid_cluster";
  std::vector<std::pair<std::string, std::pair<std::string, int>>> entries;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const LineError fail(line_no);
    if (!saw_header) {
      const auto w = words(line);
      if (w.size() != 2 || w[0] != kHeader) {
        fail("first line must be '" + std::string(kHeader) + " " +
             std::to_string(kFormatVersion) + "'");
      }
      if (parse_int(w[1], fail) != kFormatVersion) fail("unsupported config version " + w[1]);
      saw_header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key");
    if (key != "obstacle" && seen.contains(key)) fail("duplicate key '" + key + "'");
    seen[key] = line_no;
    if (key == "robot") {
      robot_name = value;
    } else {
      entries.push_back({key, {value, line_no}});
    }
  }
  if (!saw_header) throw ConfigError("config is empty; expected a 'safebench-config 1' header");

  BenchmarkConfig c;
  if (robot_name == "rigid_cluster") {
    c = default_config(RobotKind::RigidCluster);
  } else if (robot_name == "planar_arm") {
    c = default_config(RobotKind::PlanarArm);
  } else {
    LineError{seen["robot"]}("robot must be rigid_cluster or planar_arm");
  }

  bool explicit_obstacles = false;
  for (const auto& [key, vl] : entries) {
    const auto& [value, ln] = vl;
    const LineError fail(ln);
    if (key == "steps") {
      c.sim.steps = parse_int(value, fail);
    } else if (key == "dt") {
      c.sim.dt = parse_double(value, fail);
    } else if (key == "u_max") {
      c.sim.u_max = parse_double(value, fail);
    } else if (key == "kp") {
      c.sim.kp = parse_double(value, fail);
    } else if (key == "goal") {
      c.sim.goal = parse_vec3(value, fail);
    } else if (key == "start") {
      c.sim.start = parse_vec3(value, fail);
    } else if (key == "scene") {
      if (value == "crowding") {
        c.scene.kind = SceneKind::Crowding;
      } else if (value == "explicit") {
        c.scene.kind = SceneKind::Explicit;
      } else {
        fail("scene must be crowding or explicit");
      }
    } else if (key == "obstacles") {
      c.scene.n_obstacles = static_cast<std::size_t>(parse_uint(value, fail));
    } else if (key == "obstacle") {
      const auto w = words(value);
      if (w.size() != 4) fail("obstacle needs 'x y z radius'");
      Obstacle o{{parse_double(w[0], fail), parse_double(w[1], fail), parse_double(w[2], fail)},
                 parse_double(w[3], fail)};
      if (!(o.radius > 0.0)) fail("obstacle radius must be positive");
      c.scene.obstacles.push_back(o);
      explicit_obstacles = true;
    } else if (key == "workspace_min") {
      c.scene.workspace.lo = parse_vec3(value, fail);
    } else if (key == "workspace_max") {
      c.scene.workspace.hi = parse_vec3(value, fail);
    } else if (key == "exclusion_margin") {
      c.scene.exclusion_margin = parse_double(value, fail);
    } else if (key == "filters") {
      c.filters.clear();
      for (const auto& name : split(value, ',')) {
        const auto kind = parse_filter_kind(name);
        if (!kind) fail("unknown filter '" + name + "'; valid: " + valid_filter_names());
        c.filters.push_back(*kind);
      }
    } else if (key == "seeds") {
      c.seeds.clear();
      for (const auto& s : split(value, ',')) c.seeds.push_back(parse_uint(s, fail));
    } else if (key == "attack") {
      const auto fam = parse_attack_family(value);
      if (!fam) fail("attack must be none, noise, latency or crowding");
      c.attack = *fam;
    } else if (key == "levels") {
      c.levels.clear();
      for (const auto& s : split(value, ',')) {
        const auto level = parse_level(s);
        if (!level) fail("unknown level '" + s + "'");
        c.levels.push_back(*level);
      }
    } else if (key == "out") {
      c.out_dir = value;
    } else if (key == "jobs") {
      c.jobs = static_cast<int>(parse_int(value, fail));
    } else if (key == "d_margin") {
      c.params.d_margin = parse_double(value, fail);
    } else if (key == "alpha") {
      c.params.alpha = parse_double(value, fail);
    } else if (key == "eta") {
      c.params.eta = parse_double(value, fail);
    } else if (key == "lambda_sss") {
      c.params.lambda_sss = parse_double(value, fail);
    } else if (key == "k_rep") {
      c.params.k_rep = parse_double(value, fail);
    } else if (key == "rho0") {
      c.params.rho0 = parse_double(value, fail);
    } else if (key == "k_slide") {
      c.params.k_slide = parse_double(value, fail);
    } else if (key == "eps_robust") {
      c.params.eps_robust = parse_double(value, fail);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (c.scene.kind == SceneKind::Crowding && explicit_obstacles) {
    throw ConfigError("'obstacle' entries require 'scene = explicit'");
  }
  c.params.u_max = c.sim.u_max;
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return c;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const BenchmarkConfig& c) {
  std::ostringstream os;
  os << kHeader << " " << kFormatVersion << "\n";
  os << "robot = " << to_string(c.robot) << "\n";
  os << "steps = " << c.sim.steps << "\n";
  os << "dt = " << fmt(c.sim.dt) << "\n";
  os << "u_max = " << fmt(c.sim.u_max) << "\n";
  os << "kp = " << fmt(c.sim.kp) << "\n";
  os << "goal = " << fmt(c.sim.goal) << "\n";
  os << "start = " << fmt(c.sim.start) << "\n";
  os << "scene = " << (c.scene.kind == SceneKind::Crowding ? "crowding" : "explicit") << "\n";
  os << "obstacles = " << c.scene.n_obstacles << "\n";
  if (c.scene.kind == SceneKind::Explicit) {
    for (const auto& o : c.scene.obstacles) {
      os << "obstacle = " << fmt(o.center) << " " << fmt(o.radius) << "\n";
    }
  }
  os << "workspace_min = " << fmt(c.scene.workspace.lo) << "\n";
  os << "workspace_max = " << fmt(c.scene.workspace.hi) << "\n";
  os << "exclusion_margin = " << fmt(c.scene.exclusion_margin) << "\n";
  os << "filters = ";
  for (std::size_t i = 0; i < c.filters.size(); ++i) {
    os << (i ? "," : "") << to_string(c.filters[i]);
  }
  os << "\nseeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << "\nattack = " << to_string(c.attack) << "\n";
  if (!c.levels.empty()) {
    os << "levels = ";
    for (std::size_t i = 0; i < c.levels.size(); ++i) os << (i ? "," : "") << to_string(c.levels[i]);
    os << "\n";
  }
  os << "out = " << c.out_dir.string() << "\n";
  os << "jobs = " << c.jobs << "\n";
  os << "d_margin = " << fmt(c.params.d_margin) << "\n";
  os << "alpha = " << fmt(c.params.alpha) << "\n";
  os << "eta = " << fmt(c.params.eta) << "\n";
  os << "lambda_sss = " << fmt(c.params.lambda_sss) << "\n";
  os << "k_rep = " << fmt(c.params.k_rep) << "\n";
  os << "rho0 = " << fmt(c.params.rho0) << "\n";
  os << "k_slide = " << fmt(c.params.k_slide) << "\n";
  os << "eps_robust = " << fmt(c.params.eps_robust) << "\n";
  return os.str();
}

std::vector<Ball> scene_exclusions(const BenchmarkConfig& config) {
  const RobotModel model = make_robot(config.robot);
  const double pad = kCrowdingObstacleRadius + config.scene.exclusion_margin;
  std::vector<Ball> balls;
  if (model.kind() == RobotKind::RigidCluster) {
    const double r = bounding_radius(model) + pad;
    const Vec3 goal_origin = config.sim.goal - model.volumes()[model.arm_volume_index()].offset;
    balls.push_back({config.sim.start, r});
    balls.push_back({goal_origin, r});
  } else {
    RobotState start;
    start.q = config.sim.start;
    const Kinematics fk = forward_kinematics(model, start);
    for (std::size_t i = 0; i < model.num_volumes(); ++i) {
      balls.push_back({fk.centers[i], model.volumes()[i].radius + pad});
    }
    balls.push_back({Vec3::Zero(), pad});
    balls.push_back({config.sim.goal, model.volumes()[model.arm_volume_index()].radius + pad});
  }
  return balls;
}

std::vector<Obstacle> build_scene(const BenchmarkConfig& config, const AttackSpec& attack,
                                  std::uint64_t seed) {
  if (const auto* crowd = std::get_if<attack::Crowding>(&attack)) {
    return generate_crowding_scene(crowd->n_obstacles, seed, config.scene.workspace,
                                   scene_exclusions(config));
  }
  if (config.scene.kind == SceneKind::Explicit) return config.scene.obstacles;
  return generate_crowding_scene(config.scene.n_obstacles, seed, config.scene.workspace,
                                 scene_exclusions(config));
}

}  // namespace safebench
