#include "odomfuse/mapmodel.hpp"

#include <cmath>
#include <numbers>

namespace odomfuse
{

namespace
{

constexpr double kRayEpsilon = 1e-9;
// Hits land exactly on wall lines, which often coincide with voxel-grid
// boundaries; voxel keys are taken a small step back along the ray so they
// do not flip on last-ulp differences.
constexpr double kHitBackoff = 1e-9;
// Slack allowed when checking that a pose source covers the truth time span.
constexpr double kCoverageSlack = 0.25;

// Intersection parameter of a ray with one axis-aligned segment, or infinity.
double ray_segment_t(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, const WallSegment& seg)
{
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (seg.x1 == seg.x2) {  // vertical wall
    if (std::abs(dir.x()) < 1e-15) return kInf;
    const double t = (seg.x1 - origin.x()) / dir.x();
    if (t <= kRayEpsilon) return kInf;
    const double y = origin.y() + t * dir.y();
    if (y < std::min(seg.y1, seg.y2) - 1e-12 || y > std::max(seg.y1, seg.y2) + 1e-12) return kInf;
    return t;
  }
  if (seg.y1 == seg.y2) {  // horizontal wall
    if (std::abs(dir.y()) < 1e-15) return kInf;
    const double t = (seg.y1 - origin.y()) / dir.y();
    if (t <= kRayEpsilon) return kInf;
    const double x = origin.x() + t * dir.x();
    if (x < std::min(seg.x1, seg.x2) - 1e-12 || x > std::max(seg.x1, seg.x2) + 1e-12) return kInf;
    return t;
  }
  throw std::invalid_argument("WallSegment must be axis-aligned");
}

}  // namespace

void MapConfig::validate() const
{
  if (!(detection_rate > 0.0) || !(map_update_rate > 0.0)) {
    throw std::invalid_argument("MapConfig: rates must be > 0");
  }
  if (!(sensor_fov > 0.0) || sensor_fov > 2.0 * std::numbers::pi) {
    throw std::invalid_argument("MapConfig: sensor_fov must be in (0, 2pi]");
  }
  if (!(sensor_range > 0.0)) {
    throw std::invalid_argument("MapConfig: sensor_range must be > 0");
  }
  if (rays_per_scan < 1) {
    throw std::invalid_argument("MapConfig: rays_per_scan must be >= 1");
  }
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("MapConfig: voxel_size must be > 0");
  }
}

void WorldModel::validate() const
{
  if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin)) {
    throw std::invalid_argument("WorldModel: degenerate bounds");
  }
  if (obstacles.empty()) {
    throw std::invalid_argument("WorldModel: no obstacles");
  }
  for (const auto& seg : obstacles) {
    if (seg.x1 != seg.x2 && seg.y1 != seg.y2) {
      throw std::invalid_argument("WorldModel: obstacles must be axis-aligned segments");
    }
    const double lo_x = std::min(seg.x1, seg.x2);
    const double hi_x = std::max(seg.x1, seg.x2);
    const double lo_y = std::min(seg.y1, seg.y2);
    const double hi_y = std::max(seg.y1, seg.y2);
    if (lo_x < bounds.xmin - 1e-9 || hi_x > bounds.xmax + 1e-9 || lo_y < bounds.ymin - 1e-9 ||
        hi_y > bounds.ymax + 1e-9) {
      throw std::invalid_argument("WorldModel: obstacle outside bounds");
    }
  }
}

std::vector<Timestamp> node_creation_times(double duration, double rate)
{
  if (duration < 0.0) {
    throw std::invalid_argument("node_creation_times: negative duration");
  }
  if (!(rate > 0.0)) {
    throw std::invalid_argument("node_creation_times: rate must be > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
  std::vector<Timestamp> times;
  times.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    times.push_back(static_cast<double>(k) / rate);
  }
  return times;
}

bool cast_ray(const WorldModel& world, const Eigen::Vector2d& origin, double angle, double max_range,
              Eigen::Vector2d& hit)
{
  const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : world.obstacles) {
    best = std::min(best, ray_segment_t(origin, dir, seg));
  }
  if (best > max_range) {
    return false;
  }
  hit = origin + best * dir;
  return true;
}

VoxelSet scan_voxels(const Trajectory& truth, const Trajectory& pose_source, const WorldModel& world,
                     const MapConfig& cfg)
{
  cfg.validate();
  world.validate();
  if (truth.empty() || pose_source.empty()) {
    throw std::invalid_argument("scan_voxels: empty trajectory");
  }
  const double duration = truth.end_stamp();
  if (pose_source.start_stamp() > kCoverageSlack || pose_source.end_stamp() < duration - kCoverageSlack) {
    throw std::invalid_argument("scan_voxels: pose source does not cover the truth time span");
  }

  VoxelSet voxels;
  const auto times = node_creation_times(duration, cfg.detection_rate);
  for (double t : times) {
    const Pose2D pose = interpolate_pose(pose_source, t);
    const Eigen::Vector2d origin(pose.x, pose.y);
    for (int i = 0; i < cfg.rays_per_scan; ++i) {
      const double offset =
          cfg.rays_per_scan == 1
              ? 0.0
              : -0.5 * cfg.sensor_fov + cfg.sensor_fov * static_cast<double>(i) / (cfg.rays_per_scan - 1);
      const double angle = pose.yaw + offset;
      Eigen::Vector2d hit;
      if (cast_ray(world, origin, angle, cfg.sensor_range, hit)) {
        const Eigen::Vector2d keyed =
            hit - kHitBackoff * Eigen::Vector2d(std::cos(angle), std::sin(angle));
        voxels.insert({static_cast<std::int64_t>(std::floor(keyed.x() / cfg.voxel_size)),
                       static_cast<std::int64_t>(std::floor(keyed.y() / cfg.voxel_size))});
      }
    }
  }
  return voxels;
}

MapStats simulate_scan(const Trajectory& truth, const Trajectory& pose_source, const WorldModel& world,
                       const MapConfig& cfg)
{
  MapStats stats;
  stats.node_count = node_creation_times(truth.end_stamp(), cfg.detection_rate).size();
  stats.point_count = scan_voxels(truth, pose_source, world, cfg).size();
  stats.build_time = truth.end_stamp();
  return stats;
}

double estimate_build_time(double base_duration, std::span<const double> position_errors,
                           double rescan_threshold, double rescan_penalty)
{
  if (rescan_threshold < 0.0 || rescan_penalty < 0.0) {
    throw std::invalid_argument("estimate_build_time: threshold and penalty must be >= 0");
  }
  std::size_t excursions = 0;
  bool above = false;
  for (double e : position_errors) {
    const bool now_above = e > rescan_threshold;
    if (now_above && !above) {
      ++excursions;
    }
    above = now_above;
  }
  return base_duration + rescan_penalty * static_cast<double>(excursions);
}

}  // namespace odomfuse
