#include "odomfuse/pipeline.hpp"

#include "odomfuse/mapmodel.hpp"
#include "odomfuse/simsensor.hpp"

#include <algorithm>

namespace odomfuse
{

namespace
{

double mean(const std::vector<double>& v)
{
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

bool measurement_less(const Measurement& a, const Measurement& b)
{
  if (a.stamp() != b.stamp()) return a.stamp() < b.stamp();
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind());
  const auto& av = a.value();
  const auto& bv = b.value();
  for (Eigen::Index i = 0; i < av.size(); ++i) {
    if (av(i) != bv(i)) return av(i) < bv(i);
  }
  // std::sort is not stable; break remaining ties on the noise diagonal so
  // the order never depends on the input permutation.
  for (Eigen::Index i = 0; i < av.size(); ++i) {
    if (a.noise()(i, i) != b.noise()(i, i)) return a.noise()(i, i) < b.noise()(i, i);
  }
  return false;
}

void sort_measurements(std::vector<Measurement>& measurements)
{
  std::sort(measurements.begin(), measurements.end(), measurement_less);
}

Trajectory vo_trajectory(const std::vector<Measurement>& vo_measurements)
{
  Trajectory traj;
  traj.samples.reserve(vo_measurements.size());
  for (const auto& m : vo_measurements) {
    if (m.kind() != SensorKind::kVoPose) {
      throw std::invalid_argument("vo_trajectory: non-VO measurement in stream");
    }
    traj.samples.push_back({m.stamp(), {m.value()(0), m.value()(1), m.value()(2)}});
  }
  return traj;
}

SeedRunResult run_seed_pipeline(const ScenarioConfig& cfg, std::uint64_t seed)
{
  cfg.validate();

  SeedRunResult run;
  run.seed = seed;
  run.truth = generate_ground_truth(cfg.motion, cfg.dt_sim, Pose2D{});

  SensorSuiteConfig suite = cfg.sensors;
  suite.seed = seed;

  run.stream = sample_ips(run.truth, suite);
  const auto encoders = sample_encoders(run.truth, cfg.motion, suite);
  const auto imu = sample_imu(run.truth, cfg.motion, suite);
  run.stream.insert(run.stream.end(), encoders.begin(), encoders.end());
  run.stream.insert(run.stream.end(), imu.begin(), imu.end());
  sort_measurements(run.stream);

  run.vo = vo_trajectory(sample_vo(run.truth, suite));

  run.fusion = process_stream(run.stream, cfg.filter);
  const Trajectory& fused = run.fusion.trajectory;

  run.fused_series = pose_error_series(run.truth, fused, default_max_gap(fused));
  run.vo_series = pose_error_series(run.truth, run.vo, default_max_gap(run.vo));
  run.ate_fused = ate(run.truth, fused, default_max_gap(fused));
  run.ate_vo = ate(run.truth, run.vo, default_max_gap(run.vo));

  MapConfig low_cfg = cfg.map;
  low_cfg.detection_rate = kBaselineDetectionRate;
  run.map_stats.rate_low = kBaselineDetectionRate;
  run.map_stats.rate_high = cfg.map.detection_rate;
  run.map_stats.low = simulate_scan(run.truth, fused, cfg.world, low_cfg);
  run.map_stats.high = simulate_scan(run.truth, fused, cfg.world, cfg.map);

  const double duration = run.truth.end_stamp();
  run.build_times.fused =
      estimate_build_time(duration, run.fused_series.position_errors(), kRescanThreshold, kRescanPenalty);
  run.build_times.vo =
      estimate_build_time(duration, run.vo_series.position_errors(), kRescanThreshold, kRescanPenalty);

  const RunTag tag{cfg.name, seed};
  run.comparison = compare_report({tag, run.truth}, {tag, fused}, {tag, run.vo}, {tag, run.map_stats},
                                  {tag, run.build_times});
  return run;
}

nlohmann::json comparison_to_json(const ComparisonReport& report)
{
  return {
      {"scenario", report.tag.scenario},
      {"seed", report.tag.seed},
      {"ate_fused", report.ate_fused},
      {"ate_vo", report.ate_vo},
      {"ate_ratio", report.ratio},
      {"n_pairs_fused", report.n_pairs_fused},
      {"n_pairs_vo", report.n_pairs_vo},
      {"fused_max_position_error", report.fused_max_position_error},
      {"vo_max_position_error", report.vo_max_position_error},
      {"fused_max_jump", report.fused_max_jump},
      {"vo_max_jump", report.vo_max_jump},
      {"point_count_low_rate", report.point_count_low},
      {"point_count_high_rate", report.point_count_high},
      {"point_ratio", report.point_ratio},
      {"build_time_fused", report.build_time_fused},
      {"build_time_vo", report.build_time_vo},
  };
}

nlohmann::json run_bench(const ScenarioConfig& cfg, const std::filesystem::path& out_dir)
{
  cfg.validate();
  const std::string hash = config_hash(cfg);
  const std::filesystem::path scenario_dir = out_dir / cfg.name;

  std::vector<double> ratios, point_ratios, ates_fused, ates_vo, builds_fused, builds_vo;
  nlohmann::json per_seed = nlohmann::json::array();
  nlohmann::json ate_rows = nlohmann::json::array();
  std::string ate_csv = "seed,ate_fused,ate_vo\n";

  for (std::uint64_t seed : cfg.seeds) {
    const SeedRunResult run = run_seed_pipeline(cfg, seed);
    const std::filesystem::path seed_dir = scenario_dir / ("seed_" + std::to_string(seed));

    write_trajectory_csv(seed_dir / "truth.csv", run.truth);
    write_measurements_jsonl(seed_dir / "measurements.jsonl", run.stream);
    write_trajectory_csv(seed_dir / "fused.csv", run.fusion.trajectory);
    write_trajectory_csv(seed_dir / "vo.csv", run.vo);
    write_error_series_csv(seed_dir / "error_series_fused.csv", run.fused_series);
    write_error_series_csv(seed_dir / "error_series_vo.csv", run.vo_series);

    nlohmann::json seed_report = comparison_to_json(run.comparison);
    seed_report["config_hash"] = hash;
    seed_report["dropped_out_of_order"] = run.fusion.dropped_out_of_order;
    seed_report["rejected_by_gate"] = run.fusion.rejected_by_gate;
    write_text_file(seed_dir / "report.json", seed_report.dump(2) + "\n");

    per_seed.push_back(seed_report);
    ratios.push_back(run.comparison.ratio);
    point_ratios.push_back(run.comparison.point_ratio);
    ates_fused.push_back(run.comparison.ate_fused);
    ates_vo.push_back(run.comparison.ate_vo);
    builds_fused.push_back(run.comparison.build_time_fused);
    builds_vo.push_back(run.comparison.build_time_vo);

    ate_csv += std::to_string(seed) + "," + format_double(run.comparison.ate_fused) + "," +
               format_double(run.comparison.ate_vo) + "\n";
  }

  nlohmann::json report = {
      {"scenario", cfg.name},
      {"config_hash", hash},
      {"n_seeds", cfg.seeds.size()},
      {"per_seed", per_seed},
      {"aggregate",
       {
           {"ate_ratio_mean", mean(ratios)},
           {"ate_ratio_min", *std::min_element(ratios.begin(), ratios.end())},
           {"ate_ratio_max", *std::max_element(ratios.begin(), ratios.end())},
           {"ate_fused_mean", mean(ates_fused)},
           {"ate_fused_max", *std::max_element(ates_fused.begin(), ates_fused.end())},
           {"ate_vo_mean", mean(ates_vo)},
           {"point_ratio_mean", mean(point_ratios)},
           {"point_ratio_min", *std::min_element(point_ratios.begin(), point_ratios.end())},
           {"point_ratio_max", *std::max_element(point_ratios.begin(), point_ratios.end())},
           {"build_time_fused_mean", mean(builds_fused)},
           {"build_time_vo_mean", mean(builds_vo)},
       }},
  };

  write_text_file(scenario_dir / "bench_report.json", report.dump(2) + "\n");
  write_text_file(scenario_dir / "ate_per_seed.csv", ate_csv);
  return report;
}

}  // namespace odomfuse
