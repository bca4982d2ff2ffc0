#ifndef ODOMFUSE_PIPELINE_HPP_
#define ODOMFUSE_PIPELINE_HPP_

#include "odomfuse/config.hpp"
#include "odomfuse/ekf.hpp"
#include "odomfuse/eval.hpp"
#include "odomfuse/io.hpp"

#include <filesystem>

namespace odomfuse
{

// Contiguous position-error excursions above this threshold are treated as
// odometry losses that force a re-scan.
inline constexpr double kRescanThreshold = 0.05;  // meters
inline constexpr double kRescanPenalty = 10.0;    // seconds per excursion

// Baseline node rate the synchronized detection rate is compared against.
inline constexpr double kBaselineDetectionRate = 1.0;  // Hz

// Total order used to stream measurements into the filter: by stamp, then
// sensor kind, then value. Independent of the order samples were generated
// or loaded in, so shuffled files fuse identically.
bool measurement_less(const Measurement& a, const Measurement& b);
void sort_measurements(std::vector<Measurement>& measurements);

// Everything one seed's pipeline produces.
struct SeedRunResult
{
  std::uint64_t seed = 0;
  Trajectory truth;
  std::vector<Measurement> stream;  // filter input: IPS + encoder + IMU, sorted
  Trajectory vo;                    // VO passthrough baseline
  FusionResult fusion;
  ErrorSeries fused_series;
  ErrorSeries vo_series;
  AteReport ate_fused;
  AteReport ate_vo;
  MapStatsPair map_stats;    // fused pose source at baseline vs synchronized rate
  BuildTimePair build_times;
  ComparisonReport comparison;
};

// Simulate -> fuse -> map -> evaluate for one seed, entirely in memory.
SeedRunResult run_seed_pipeline(const ScenarioConfig& cfg, std::uint64_t seed);

// VO measurements viewed as a trajectory (the passthrough baseline).
Trajectory vo_trajectory(const std::vector<Measurement>& vo_measurements);

// Runs every seed of a scenario, writes per-seed artifacts and plot CSVs
// under out_dir/<scenario>/, and returns the aggregate report (also written
// to bench_report.json).
nlohmann::json run_bench(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

nlohmann::json comparison_to_json(const ComparisonReport& report);

}  // namespace odomfuse

#endif  // ODOMFUSE_PIPELINE_HPP_
