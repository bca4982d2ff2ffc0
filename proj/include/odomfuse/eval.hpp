#ifndef ODOMFUSE_EVAL_HPP_
#define ODOMFUSE_EVAL_HPP_

#include "odomfuse/core.hpp"
#include "odomfuse/mapmodel.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace odomfuse
{

// One estimate sample matched to its nearest-in-time truth sample.
struct PosePair
{
  Timestamp stamp = 0.0;  // estimate stamp
  Pose2D truth;
  Pose2D estimate;
  double time_offset = 0.0;  // estimate stamp minus truth stamp
};

// Signed per-axis error over time (estimate minus truth).
struct ErrorSeries
{
  struct Sample
  {
    Timestamp stamp = 0.0;
    double ex = 0.0;
    double ey = 0.0;
    double eyaw = 0.0;

    double position_error() const { return std::hypot(ex, ey); }
  };
  std::vector<Sample> samples;

  std::vector<double> position_errors() const;
  double max_position_error() const;
  // Largest change in position error between consecutive samples; the
  // discontinuity measure for drift-jump detection.
  double max_consecutive_jump() const;
};

struct AteReport
{
  double ate = 0.0;  // mean 2D Euclidean position error over pairs
  std::size_t n_pairs = 0;
  double max_error = 0.0;
  std::vector<double> per_pair_errors;
};

// Pairs every estimate sample with the nearest-in-time truth sample within
// max_gap; unpaired estimate samples are skipped. Throws NoOverlapError when
// nothing pairs.
std::vector<PosePair> associate(const Trajectory& truth, const Trajectory& estimate, double max_gap);

// Absolute trajectory error: the mean Euclidean position distance over
// associated pairs. No alignment transform is applied; both trajectories are
// expected in the same world frame.
AteReport ate(const Trajectory& truth, const Trajectory& estimate, double max_gap);

// Per-axis signed error series over associated pairs. Yaw errors are
// angle-wrapped. Consecutive pairs sharing a stamp collapse to the last one
// so the series stays strictly increasing in time.
ErrorSeries pose_error_series(const Trajectory& truth, const Trajectory& estimate, double max_gap);

// Default association gap: half the median estimate sample interval.
double default_max_gap(const Trajectory& estimate);

// Identifies which scenario run an input came from.
struct RunTag
{
  std::string scenario;
  std::uint64_t seed = 0;

  bool operator==(const RunTag&) const = default;
};

template <typename T>
struct Tagged
{
  RunTag tag;
  T value;
};

// Map statistics at the baseline (1 Hz analogue) and synchronized rates.
struct MapStatsPair
{
  double rate_low = 0.0;
  double rate_high = 0.0;
  MapStats low;
  MapStats high;
};

// Build-time pair computed from the two odometry error series.
struct BuildTimePair
{
  double fused = 0.0;
  double vo = 0.0;
};

// One seed's head-to-head comparison between the fused and VO pipelines.
struct ComparisonReport
{
  RunTag tag;
  double ate_fused = 0.0;
  double ate_vo = 0.0;
  double ratio = 0.0;  // ate_vo / ate_fused
  std::size_t n_pairs_fused = 0;
  std::size_t n_pairs_vo = 0;
  double fused_max_position_error = 0.0;
  double vo_max_position_error = 0.0;
  double fused_max_jump = 0.0;
  double vo_max_jump = 0.0;
  std::size_t point_count_low = 0;
  std::size_t point_count_high = 0;
  double point_ratio = 0.0;  // high / low
  double build_time_fused = 0.0;
  double build_time_vo = 0.0;
};

// Assembles the comparison record for one seed. All inputs must carry the
// same run tag; a mismatch is an invalid-argument error.
ComparisonReport compare_report(const Tagged<Trajectory>& truth, const Tagged<Trajectory>& fused,
                                const Tagged<Trajectory>& vo, const Tagged<MapStatsPair>& map_stats,
                                const Tagged<BuildTimePair>& build_times);

}  // namespace odomfuse

#endif  // ODOMFUSE_EVAL_HPP_
