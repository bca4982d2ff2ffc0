#ifndef ODOMFUSE_CONFIG_HPP_
#define ODOMFUSE_CONFIG_HPP_

#include "odomfuse/ekf.hpp"
#include "odomfuse/mapmodel.hpp"
#include "odomfuse/simsensor.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace odomfuse
{

// Complete description of one simulation experiment: motion script, sensor
// suite, filter tuning, map surrogate parameters, world geometry, seed list.
// One JSON document per scenario; the canonical dump is hashed into reports
// for provenance.
struct ScenarioConfig
{
  std::string name;
  MotionScript motion;
  SensorSuiteConfig sensors;
  FilterConfig filter;
  MapConfig map;
  WorldModel world;
  std::vector<std::uint64_t> seeds;
  double dt_sim = 0.005;

  void validate() const;
};

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg);

// Parses and validates a scenario file. Parse failures carry the byte
// position; validation failures name the offending field.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// FNV-1a hash of the canonical JSON form, as fixed-width hex.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace odomfuse

#endif  // ODOMFUSE_CONFIG_HPP_
