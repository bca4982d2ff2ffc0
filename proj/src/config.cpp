#include "odomfuse/config.hpp"

#include "odomfuse/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace odomfuse
{

namespace
{

using nlohmann::json;

// Wraps json access so type errors name the field path.
template <typename T>
T field(const json& j, const std::string& path, const char* key)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("config field '" + path + "." + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const std::string& path, const char* key, T def)
{
  if (!j.contains(key)) return def;
  return field<T>(j, path, key);
}

Vector8d vec8_field(const json& j, const std::string& path, const char* key, const Vector8d& def)
{
  if (!j.contains(key)) return def;
  const auto v = field<std::vector<double>>(j, path, key);
  if (v.size() != 8) {
    throw ParseError("config field '" + path + "." + key + "': expected 8 entries, got " +
                     std::to_string(v.size()));
  }
  return Eigen::Map<const Vector8d>(v.data());
}

std::uint64_t fnv1a64(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void ScenarioConfig::validate() const
{
  if (name.empty()) {
    throw std::invalid_argument("ScenarioConfig: name must be non-empty");
  }
  const bool name_ok = std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
  if (!name_ok) {
    throw std::invalid_argument("ScenarioConfig: name must use only [A-Za-z0-9_-]");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("ScenarioConfig: seeds must be non-empty");
  }
  if (!(dt_sim > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: dt_sim must be > 0");
  }
  motion.validate();
  sensors.validate();
  filter.validate();
  map.validate();
  world.validate();
}

ScenarioConfig scenario_config_from_json(const json& j)
{
  ScenarioConfig cfg;
  cfg.name = field<std::string>(j, "", "name");
  cfg.dt_sim = field_or<double>(j, "", "dt_sim", cfg.dt_sim);
  cfg.seeds = field<std::vector<std::uint64_t>>(j, "", "seeds");

  const json& motion = j.at("motion");
  for (const auto& seg : field<std::vector<json>>(motion, "motion", "segments")) {
    MotionSegment s;
    s.duration = field<double>(seg, "motion.segments[]", "duration");
    s.v = field<double>(seg, "motion.segments[]", "v");
    s.w = field<double>(seg, "motion.segments[]", "w");
    cfg.motion.segments.push_back(s);
  }

  if (j.contains("sensors")) {
    const json& sensors = j.at("sensors");
    if (sensors.contains("ips")) {
      const json& s = sensors.at("ips");
      cfg.sensors.ips.rate = field_or(s, "sensors.ips", "rate", cfg.sensors.ips.rate);
      cfg.sensors.ips.sigma_xy = field_or(s, "sensors.ips", "sigma_xy", cfg.sensors.ips.sigma_xy);
    }
    if (sensors.contains("encoder")) {
      const json& s = sensors.at("encoder");
      cfg.sensors.encoder.rate = field_or(s, "sensors.encoder", "rate", cfg.sensors.encoder.rate);
      cfg.sensors.encoder.sigma_v = field_or(s, "sensors.encoder", "sigma_v", cfg.sensors.encoder.sigma_v);
    }
    if (sensors.contains("imu")) {
      const json& s = sensors.at("imu");
      cfg.sensors.imu.rate = field_or(s, "sensors.imu", "rate", cfg.sensors.imu.rate);
      cfg.sensors.imu.sigma_yaw = field_or(s, "sensors.imu", "sigma_yaw", cfg.sensors.imu.sigma_yaw);
      cfg.sensors.imu.sigma_vyaw = field_or(s, "sensors.imu", "sigma_vyaw", cfg.sensors.imu.sigma_vyaw);
      cfg.sensors.imu.sigma_a = field_or(s, "sensors.imu", "sigma_a", cfg.sensors.imu.sigma_a);
      cfg.sensors.imu.yaw_drift_rate =
          field_or(s, "sensors.imu", "yaw_drift_rate", cfg.sensors.imu.yaw_drift_rate);
    }
    if (sensors.contains("vo")) {
      const json& s = sensors.at("vo");
      cfg.sensors.vo.rate = field_or(s, "sensors.vo", "rate", cfg.sensors.vo.rate);
      cfg.sensors.vo.latency = field_or(s, "sensors.vo", "latency", cfg.sensors.vo.latency);
      cfg.sensors.vo.walk_sigma = field_or(s, "sensors.vo", "walk_sigma", cfg.sensors.vo.walk_sigma);
      cfg.sensors.vo.jump_prob_per_sample =
          field_or(s, "sensors.vo", "jump_prob_per_sample", cfg.sensors.vo.jump_prob_per_sample);
      cfg.sensors.vo.jump_sigma = field_or(s, "sensors.vo", "jump_sigma", cfg.sensors.vo.jump_sigma);
    }
  }

  if (j.contains("filter")) {
    const json& f = j.at("filter");
    cfg.filter.process_noise.q_diag =
        vec8_field(f, "filter", "process_noise_diag", cfg.filter.process_noise.q_diag);
    cfg.filter.gating_threshold = field_or(f, "filter", "gating_threshold", cfg.filter.gating_threshold);
    cfg.filter.initial_covariance_diag =
        vec8_field(f, "filter", "initial_covariance_diag", cfg.filter.initial_covariance_diag);
    cfg.filter.min_dt = field_or(f, "filter", "min_dt", cfg.filter.min_dt);
  }

  if (j.contains("map")) {
    const json& m = j.at("map");
    cfg.map.detection_rate = field_or(m, "map", "detection_rate", cfg.map.detection_rate);
    cfg.map.map_update_rate = field_or(m, "map", "map_update_rate", cfg.map.map_update_rate);
    cfg.map.sensor_fov = field_or(m, "map", "sensor_fov", cfg.map.sensor_fov);
    cfg.map.sensor_range = field_or(m, "map", "sensor_range", cfg.map.sensor_range);
    cfg.map.rays_per_scan = field_or(m, "map", "rays_per_scan", cfg.map.rays_per_scan);
    cfg.map.voxel_size = field_or(m, "map", "voxel_size", cfg.map.voxel_size);
  }

  const json& world = j.at("world");
  const json& bounds = world.at("bounds");
  cfg.world.bounds.xmin = field<double>(bounds, "world.bounds", "xmin");
  cfg.world.bounds.ymin = field<double>(bounds, "world.bounds", "ymin");
  cfg.world.bounds.xmax = field<double>(bounds, "world.bounds", "xmax");
  cfg.world.bounds.ymax = field<double>(bounds, "world.bounds", "ymax");
  for (const auto& seg : field<std::vector<json>>(world, "world", "obstacles")) {
    WallSegment w;
    w.x1 = field<double>(seg, "world.obstacles[]", "x1");
    w.y1 = field<double>(seg, "world.obstacles[]", "y1");
    w.x2 = field<double>(seg, "world.obstacles[]", "x2");
    w.y2 = field<double>(seg, "world.obstacles[]", "y2");
    cfg.world.obstacles.push_back(w);
  }

  cfg.validate();
  return cfg;
}

json scenario_config_to_json(const ScenarioConfig& cfg)
{
  json j;
  j["name"] = cfg.name;
  j["dt_sim"] = cfg.dt_sim;
  j["seeds"] = cfg.seeds;

  json segments = json::array();
  for (const auto& s : cfg.motion.segments) {
    segments.push_back({{"duration", s.duration}, {"v", s.v}, {"w", s.w}});
  }
  j["motion"] = {{"segments", segments}};

  j["sensors"] = {
      {"ips", {{"rate", cfg.sensors.ips.rate}, {"sigma_xy", cfg.sensors.ips.sigma_xy}}},
      {"encoder", {{"rate", cfg.sensors.encoder.rate}, {"sigma_v", cfg.sensors.encoder.sigma_v}}},
      {"imu",
       {{"rate", cfg.sensors.imu.rate},
        {"sigma_yaw", cfg.sensors.imu.sigma_yaw},
        {"sigma_vyaw", cfg.sensors.imu.sigma_vyaw},
        {"sigma_a", cfg.sensors.imu.sigma_a},
        {"yaw_drift_rate", cfg.sensors.imu.yaw_drift_rate}}},
      {"vo",
       {{"rate", cfg.sensors.vo.rate},
        {"latency", cfg.sensors.vo.latency},
        {"walk_sigma", cfg.sensors.vo.walk_sigma},
        {"jump_prob_per_sample", cfg.sensors.vo.jump_prob_per_sample},
        {"jump_sigma", cfg.sensors.vo.jump_sigma}}},
  };

  const auto& q = cfg.filter.process_noise.q_diag;
  const auto& p0 = cfg.filter.initial_covariance_diag;
  j["filter"] = {
      {"process_noise_diag", std::vector<double>(q.data(), q.data() + 8)},
      {"gating_threshold", cfg.filter.gating_threshold},
      {"initial_covariance_diag", std::vector<double>(p0.data(), p0.data() + 8)},
      {"min_dt", cfg.filter.min_dt},
  };

  j["map"] = {
      {"detection_rate", cfg.map.detection_rate},   {"map_update_rate", cfg.map.map_update_rate},
      {"sensor_fov", cfg.map.sensor_fov},           {"sensor_range", cfg.map.sensor_range},
      {"rays_per_scan", cfg.map.rays_per_scan},     {"voxel_size", cfg.map.voxel_size},
  };

  json obstacles = json::array();
  for (const auto& w : cfg.world.obstacles) {
    obstacles.push_back({{"x1", w.x1}, {"y1", w.y1}, {"x2", w.x2}, {"y2", w.y2}});
  }
  j["world"] = {{"bounds",
                 {{"xmin", cfg.world.bounds.xmin},
                  {"ymin", cfg.world.bounds.ymin},
                  {"xmax", cfg.world.bounds.xmax},
                  {"ymax", cfg.world.bounds.ymax}}},
                {"obstacles", obstacles}};
  return j;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path)
{
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return scenario_config_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string config_hash(const ScenarioConfig& cfg)
{
  const std::uint64_t h = fnv1a64(scenario_config_to_json(cfg).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace odomfuse
