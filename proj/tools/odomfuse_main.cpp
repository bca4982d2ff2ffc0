#include "odomfuse/pipeline.hpp"

#include "odomfuse/mapmodel.hpp"
#include "odomfuse/simsensor.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace
{

using namespace odomfuse;

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInitFailure = 3;
constexpr int kExitNoOverlap = 4;
constexpr int kExitIo = 5;

std::string default_out_dir()
{
  if (const char* env = std::getenv("ODOMFUSE_OUT")) {
    return env;
  }
  return "out";
}

// Accepts either a full scenario document or a bare filter object.
FilterConfig load_filter_config(const std::filesystem::path& path)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (j.contains("name")) {
    return load_scenario_config(path).filter;
  }
  const nlohmann::json wrapper = {{"filter", j}};
  FilterConfig cfg;
  if (wrapper.at("filter").contains("process_noise_diag")) {
    const auto v = wrapper.at("filter").at("process_noise_diag").get<std::vector<double>>();
    if (v.size() != 8) throw ParseError("filter.process_noise_diag: expected 8 entries");
    cfg.process_noise.q_diag = Eigen::Map<const Vector8d>(v.data());
  }
  if (j.contains("gating_threshold")) cfg.gating_threshold = j.at("gating_threshold").get<double>();
  if (j.contains("initial_covariance_diag")) {
    const auto v = j.at("initial_covariance_diag").get<std::vector<double>>();
    if (v.size() != 8) throw ParseError("filter.initial_covariance_diag: expected 8 entries");
    cfg.initial_covariance_diag = Eigen::Map<const Vector8d>(v.data());
  }
  if (j.contains("min_dt")) cfg.min_dt = j.at("min_dt").get<double>();
  cfg.validate();
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed_opt)
{
  const ScenarioConfig cfg = load_scenario_config(config_path);
  const std::uint64_t seed = seed_opt.value_or(cfg.seeds.front());

  const Trajectory truth = generate_ground_truth(cfg.motion, cfg.dt_sim, Pose2D{});
  SensorSuiteConfig suite = cfg.sensors;
  suite.seed = seed;

  std::vector<Measurement> stream = sample_ips(truth, suite);
  const auto encoders = sample_encoders(truth, cfg.motion, suite);
  const auto imu = sample_imu(truth, cfg.motion, suite);
  stream.insert(stream.end(), encoders.begin(), encoders.end());
  stream.insert(stream.end(), imu.begin(), imu.end());
  sort_measurements(stream);

  const std::filesystem::path dir =
      std::filesystem::path(out_dir) / cfg.name / ("seed_" + std::to_string(seed));
  write_trajectory_csv(dir / "truth.csv", truth);
  write_measurements_jsonl(dir / "measurements.jsonl", stream);

  std::cout << "wrote " << (dir / "truth.csv").string() << " (" << truth.size() << " rows)\n"
            << "wrote " << (dir / "measurements.jsonl").string() << " (" << stream.size()
            << " measurements)\n";
  return kExitOk;
}

int cmd_fuse(const std::string& measurements_path, const std::string& config_path, const std::string& out_dir)
{
  const FilterConfig filter = load_filter_config(config_path);
  std::vector<Measurement> stream = read_measurements_jsonl(measurements_path);
  sort_measurements(stream);

  const FusionResult result = process_stream(stream, filter);

  const std::filesystem::path dir(out_dir);
  write_trajectory_csv(dir / "fused.csv", result.trajectory);
  const nlohmann::json log = {
      {"processed", result.processed},
      {"dropped_out_of_order", result.dropped_out_of_order},
      {"rejected_by_gate", result.rejected_by_gate},
      {"skipped_before_init", result.skipped_before_init},
      {"initialized_at", result.initialized_at},
  };
  write_text_file(dir / "fuse_log.json", log.dump(2) + "\n");

  std::cout << "wrote " << (dir / "fused.csv").string() << " (" << result.trajectory.size() << " rows, "
            << result.dropped_out_of_order << " dropped)\n";
  return kExitOk;
}

int cmd_mapsim(const std::string& truth_path, const std::string& pose_path, const std::string& config_path,
               std::optional<double> rate, const std::string& out_dir)
{
  const ScenarioConfig cfg = load_scenario_config(config_path);
  const Trajectory truth = read_trajectory_csv(truth_path);
  const Trajectory poses = read_trajectory_csv(pose_path);

  MapConfig map_cfg = cfg.map;
  if (rate) {
    map_cfg.detection_rate = *rate;
  }
  const MapStats stats = simulate_scan(truth, poses, cfg.world, map_cfg);

  const nlohmann::json j = {
      {"detection_rate", map_cfg.detection_rate},
      {"node_count", stats.node_count},
      {"point_count", stats.point_count},
      {"build_time", stats.build_time},
  };
  write_text_file(std::filesystem::path(out_dir) / "mapstats.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& truth_path, const std::string& estimate_path, std::optional<double> max_gap,
             const std::string& out_dir)
{
  const Trajectory truth = read_trajectory_csv(truth_path);
  const Trajectory estimate = read_trajectory_csv(estimate_path);
  const double gap = max_gap.value_or(default_max_gap(estimate));

  const AteReport report = ate(truth, estimate, gap);
  const ErrorSeries series = pose_error_series(truth, estimate, gap);

  const nlohmann::json j = {
      {"ate", report.ate},
      {"n_pairs", report.n_pairs},
      {"max_error", report.max_error},
      {"max_gap", gap},
      {"per_pair_errors", report.per_pair_errors},
  };
  const std::filesystem::path dir(out_dir);
  write_text_file(dir / "ate_report.json", j.dump(2) + "\n");
  write_error_series_csv(dir / "error_series.csv", series);

  std::cout << "ate=" << format_double(report.ate) << " n_pairs=" << report.n_pairs
            << " max_error=" << format_double(report.max_error) << "\n";
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir)
{
  const ScenarioConfig cfg = load_scenario_config(config_path);
  const nlohmann::json report = run_bench(cfg, out_dir);

  for (const auto& seed_report : report.at("per_seed")) {
    std::cout << "seed " << seed_report.at("seed").get<std::uint64_t>()
              << ": ate_fused=" << seed_report.at("ate_fused").get<double>()
              << " ate_vo=" << seed_report.at("ate_vo").get<double>()
              << " ratio=" << seed_report.at("ate_ratio").get<double>() << "\n";
  }
  const auto& agg = report.at("aggregate");
  std::cout << "aggregate: ate_ratio mean=" << agg.at("ate_ratio_mean").get<double>()
            << " min=" << agg.at("ate_ratio_min").get<double>()
            << " point_ratio mean=" << agg.at("point_ratio_mean").get<double>()
            << " build_time fused=" << agg.at("build_time_fused_mean").get<double>()
            << " vo=" << agg.at("build_time_vo_mean").get<double>() << "\n"
            << "report: " << (std::filesystem::path(out_dir) / cfg.name / "bench_report.json").string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"odomfuse: EKF sensor-fusion odometry simulator and evaluation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  std::optional<std::uint64_t> seed;
  std::optional<double> rate;
  std::optional<double> max_gap;
  std::string measurements_path, truth_path, pose_path, estimate_path;

  auto* simulate = app.add_subcommand("simulate", "Generate ground truth and a measurement stream");
  simulate->add_option("--config", config_path, "Scenario config JSON")->required();
  simulate->add_option("--out", out_dir, "Output directory root");
  simulate->add_option("--seed", seed, "Seed override (default: first config seed)");

  auto* fuse = app.add_subcommand("fuse", "Fuse a measurement stream into a trajectory");
  fuse->add_option("measurements", measurements_path, "Measurement JSONL file")->required();
  fuse->add_option("--config", config_path, "Scenario or filter config JSON")->required();
  fuse->add_option("--out", out_dir, "Output directory root");

  auto* mapsim = app.add_subcommand("mapsim", "Run the map-accumulation surrogate");
  mapsim->add_option("truth", truth_path, "Ground-truth trajectory CSV")->required();
  mapsim->add_option("poses", pose_path, "Pose-source trajectory CSV")->required();
  mapsim->add_option("--config", config_path, "Scenario config JSON")->required();
  mapsim->add_option("--rate", rate, "Detection rate override (Hz)")->check(CLI::PositiveNumber);
  mapsim->add_option("--out", out_dir, "Output directory root");

  auto* eval_cmd = app.add_subcommand("eval", "Compute ATE and the pose-error series");
  eval_cmd->add_option("truth", truth_path, "Ground-truth trajectory CSV")->required();
  eval_cmd->add_option("estimate", estimate_path, "Estimated trajectory CSV")->required();
  eval_cmd->add_option("--max-gap", max_gap, "Association gap (s); default: half median interval");
  eval_cmd->add_option("--out", out_dir, "Output directory root");

  auto* bench = app.add_subcommand("bench", "Full pipeline over every seed of a scenario");
  bench->add_option("--config", config_path, "Scenario config JSON")->required();
  bench->add_option("--out", out_dir, "Output directory root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed);
    if (fuse->parsed()) return cmd_fuse(measurements_path, config_path, out_dir);
    if (mapsim->parsed()) return cmd_mapsim(truth_path, pose_path, config_path, rate, out_dir);
    if (eval_cmd->parsed()) return cmd_eval(truth_path, estimate_path, max_gap, out_dir);
    if (bench->parsed()) return cmd_bench(config_path, out_dir);
  } catch (const odomfuse::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const odomfuse::InitializationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInitFailure;
  } catch (const odomfuse::NoOverlapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoOverlap;
  } catch (const odomfuse::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUnexpected;
}
