#ifndef ODOMFUSE_MAPMODEL_HPP_
#define ODOMFUSE_MAPMODEL_HPP_

#include "odomfuse/core.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace odomfuse
{

struct MapConfig
{
  double detection_rate = 10.0;   // node-creation rate, Hz
  double map_update_rate = 10.0;  // output throttle metadata; no effect on accumulation
  double sensor_fov = 1.5707963267948966;  // horizontal field of view, rad
  double sensor_range = 6.0;               // meters
  int rays_per_scan = 48;
  double voxel_size = 0.02;  // meters

  void validate() const;
};

// Surrogate mapping outcome.
struct MapStats
{
  std::size_t node_count = 0;
  std::size_t point_count = 0;  // distinct occupied voxels
  double build_time = 0.0;      // trajectory duration; penalties added separately
};

// Axis-aligned wall segment: either x1 == x2 (vertical) or y1 == y2 (horizontal).
struct WallSegment
{
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
};

struct WorldModel
{
  struct Bounds
  {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
  };
  Bounds bounds;
  std::vector<WallSegment> obstacles;

  void validate() const;
};

using VoxelKey = std::pair<std::int64_t, std::int64_t>;
using VoxelSet = std::set<VoxelKey>;

// Node creation times {0, 1/rate, 2/rate, ...} up to and including duration.
std::vector<Timestamp> node_creation_times(double duration, double rate);

// Nearest wall hit along a ray from origin, within max_range. Returns false
// when the ray escapes.
bool cast_ray(const WorldModel& world, const Eigen::Vector2d& origin, double angle, double max_range,
              Eigen::Vector2d& hit);

// The deduplicated voxel set swept by scanning from pose_source at every node
// time. Rays fan uniformly over the field of view centered on the pose yaw.
VoxelSet scan_voxels(const Trajectory& truth, const Trajectory& pose_source, const WorldModel& world,
                     const MapConfig& cfg);

// Full scan simulation: node count, distinct-voxel count, and base build time
// (the trajectory duration).
MapStats simulate_scan(const Trajectory& truth, const Trajectory& pose_source, const WorldModel& world,
                       const MapConfig& cfg);

// Build-time model: base duration plus one penalty per contiguous excursion of
// the odometry position-error series above the threshold.
double estimate_build_time(double base_duration, std::span<const double> position_errors,
                           double rescan_threshold, double rescan_penalty);

}  // namespace odomfuse

#endif  // ODOMFUSE_MAPMODEL_HPP_
