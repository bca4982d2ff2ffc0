#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "odomfuse/config.hpp"
#include "odomfuse/io.hpp"
#include "odomfuse/pipeline.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>

using namespace odomfuse;

namespace
{

const std::filesystem::path kFixtureDir = ODOMFUSE_FIXTURE_DIR;
const std::filesystem::path kScenarioDir = ODOMFUSE_SCENARIO_DIR;
const std::string kCliPath = ODOMFUSE_CLI_PATH;

std::filesystem::path make_temp_dir(const std::string& tag)
{
  const auto dir = std::filesystem::temp_directory_path() / ("odomfuse_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args)
{
  const int status = std::system((kCliPath + " " + args + " > /dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

Trajectory random_trajectory(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  Trajectory traj;
  for (std::size_t i = 0; i < n; ++i) {
    traj.samples.push_back({0.0375 * static_cast<double>(i), {coord(rng), coord(rng), ang(rng)}});
  }
  return traj;
}

}  // namespace

TEST_CASE("format_double round-trips bit-exactly")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  std::vector<double> values = {0.0, -0.0, 1.0, 0.015, -6.2, 1e-300, 1e300, 3.141592653589793};
  for (int i = 0; i < 1000; ++i) values.push_back(dist(rng));

  for (double v : values) {
    const std::string s = format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(std::memcmp(&back, &v, sizeof(double)) == 0);
  }
}

TEST_CASE("trajectory CSV round-trips exactly")
{
  const Trajectory traj = random_trajectory(500, 11);
  const std::string csv = trajectory_to_csv(traj);
  CHECK(csv.substr(0, 10) == "t,x,y,yaw\n");

  const Trajectory back = trajectory_from_csv(csv);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back.samples[i].stamp == traj.samples[i].stamp);
    CHECK(back.samples[i].pose.x == traj.samples[i].pose.x);
    CHECK(back.samples[i].pose.y == traj.samples[i].pose.y);
    CHECK(back.samples[i].pose.yaw == traj.samples[i].pose.yaw);
  }
}

TEST_CASE("trajectory CSV parse errors carry line diagnostics")
{
  CHECK_THROWS_AS(trajectory_from_csv("time,x,y,yaw\n"), ParseError);
  CHECK_THROWS_AS(trajectory_from_csv("t,x,y,yaw\n1.0,2.0,3.0\n"), ParseError);
  CHECK_THROWS_AS(trajectory_from_csv("t,x,y,yaw\n1.0,2.0,3.0,abc\n"), ParseError);

  try {
    trajectory_from_csv("t,x,y,yaw\n0,0,0,0\n1.0,bad,0,0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("measurement JSONL round-trips exactly")
{
  std::vector<Measurement> stream;
  stream.emplace_back(0.0, SensorKind::kIpsPosition, Eigen::Vector2d(1.25, -0.375),
                      Eigen::Matrix2d::Identity() * 4e-4);
  stream.emplace_back(0.02, SensorKind::kImuAttitude, Eigen::Vector4d(0.1, -0.2, 0.3, -0.4),
                      Eigen::Vector4d(1e-4, 4e-4, 1e-2, 1e-2).asDiagonal().toDenseMatrix());
  stream.emplace_back(0.05, SensorKind::kEncoderVelocity, Eigen::Vector2d(0.3, 0.0),
                      Eigen::Matrix2d::Identity() * 1e-4);
  stream.emplace_back(1.3, SensorKind::kVoPose, Eigen::Vector3d(0.5, 0.5, 3.1),
                      Eigen::Vector3d(1e-3, 1e-3, 1e-4).asDiagonal().toDenseMatrix());

  const auto back = measurements_from_jsonl(measurements_to_jsonl(stream));
  REQUIRE(back.size() == stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    CHECK(back[i].stamp() == stream[i].stamp());
    CHECK(back[i].kind() == stream[i].kind());
    CHECK(back[i].value() == stream[i].value());
    CHECK(back[i].noise() == stream[i].noise());
  }
}

TEST_CASE("measurement JSONL rejects malformed lines")
{
  CHECK_THROWS_AS(measurements_from_jsonl("{not json}\n"), ParseError);
  CHECK_THROWS_AS(
      measurements_from_jsonl(R"({"t":0,"kind":"sonar","value":[1,2],"noise_diag":[1,1]})"),
      ParseError);
  CHECK_THROWS_AS(
      measurements_from_jsonl(R"({"t":0,"kind":"ips_position","value":[1,2,3],"noise_diag":[1,1,1]})"),
      ParseError);
  CHECK_THROWS_AS(
      measurements_from_jsonl(R"({"t":0,"kind":"ips_position","value":[1,2],"noise_diag":[1]})"),
      ParseError);
}

TEST_CASE("shipped scenario configs load and validate")
{
  for (const char* name :
       {"stationary_60s.json", "traj_v03_w078.json", "traj_v015_w039.json", "sweep_2s.json"}) {
    const ScenarioConfig cfg = load_scenario_config(kScenarioDir / name);
    CHECK(!cfg.name.empty());
    CHECK(cfg.seeds.size() == 10);
    CHECK(config_hash(cfg).size() == 16);
  }
}

TEST_CASE("config loader reports the offending field")
{
  const auto dir = make_temp_dir("config");
  auto cfg_json = scenario_config_to_json(load_scenario_config(kScenarioDir / "sweep_2s.json"));

  cfg_json["sensors"]["ips"]["rate"] = -5.0;
  write_text_file(dir / "bad_rate.json", cfg_json.dump());
  try {
    load_scenario_config(dir / "bad_rate.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("ips.rate") != std::string::npos);
  }

  write_text_file(dir / "broken.json", "{ not json");
  CHECK_THROWS_AS(load_scenario_config(dir / "broken.json"), ParseError);
  CHECK_THROWS_AS(load_scenario_config(dir / "missing.json"), IoError);
}

TEST_CASE("config hash is stable and sensitive")
{
  const ScenarioConfig a = load_scenario_config(kScenarioDir / "sweep_2s.json");
  const ScenarioConfig b = load_scenario_config(kScenarioDir / "sweep_2s.json");
  CHECK(config_hash(a) == config_hash(b));

  ScenarioConfig c = a;
  c.sensors.ips.sigma_xy *= 2.0;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("measurement ordering is a total order independent of input shuffle")
{
  const ScenarioConfig cfg = load_scenario_config(kScenarioDir / "sweep_2s.json");
  const Trajectory truth = generate_ground_truth(cfg.motion, cfg.dt_sim, Pose2D{});
  SensorSuiteConfig suite = cfg.sensors;
  suite.seed = 4;

  std::vector<Measurement> stream = sample_ips(truth, suite);
  const auto imu = sample_imu(truth, cfg.motion, suite);
  stream.insert(stream.end(), imu.begin(), imu.end());
  sort_measurements(stream);

  std::vector<Measurement> shuffled = stream;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(17));
  sort_measurements(shuffled);

  CHECK(measurements_to_jsonl(stream) == measurements_to_jsonl(shuffled));
}

TEST_CASE("cli: simulate is deterministic and writes the expected row count")
{
  const auto dir_a = make_temp_dir("sim_a");
  const auto dir_b = make_temp_dir("sim_b");
  const std::string config = (kScenarioDir / "stationary_60s.json").string();

  REQUIRE(run_cli("simulate --config " + config + " --out " + dir_a.string()) == 0);
  REQUIRE(run_cli("simulate --config " + config + " --out " + dir_b.string()) == 0);

  const auto truth_a = read_text_file(dir_a / "stationary_60s/seed_1/truth.csv");
  const auto truth_b = read_text_file(dir_b / "stationary_60s/seed_1/truth.csv");
  CHECK(truth_a == truth_b);
  // 12001 samples + header
  CHECK(std::count(truth_a.begin(), truth_a.end(), '\n') == 12002);

  const auto meas_a = read_text_file(dir_a / "stationary_60s/seed_1/measurements.jsonl");
  const auto meas_b = read_text_file(dir_b / "stationary_60s/seed_1/measurements.jsonl");
  CHECK(meas_a == meas_b);

  // seed override lands in a different directory with different noise
  REQUIRE(run_cli("simulate --config " + config + " --out " + dir_a.string() + " --seed 7") == 0);
  CHECK(std::filesystem::exists(dir_a / "stationary_60s/seed_7/measurements.jsonl"));
}

TEST_CASE("cli: fuse consumes simulate output and matches the shuffled stream")
{
  const auto dir = make_temp_dir("fuse");
  const std::string config = (kScenarioDir / "sweep_2s.json").string();
  REQUIRE(run_cli("simulate --config " + config + " --out " + dir.string()) == 0);

  const auto meas_path = dir / "sweep_2s/seed_1/measurements.jsonl";
  REQUIRE(run_cli("fuse " + meas_path.string() + " --config " + config + " --out " +
                  (dir / "run1").string()) == 0);
  const Trajectory fused = read_trajectory_csv(dir / "run1/fused.csv");
  CHECK(fused.size() > 100);

  // shuffle the stream on disk; the driver sorts, so the output is identical
  auto shuffled = read_measurements_jsonl(meas_path);
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
  write_measurements_jsonl(dir / "shuffled.jsonl", shuffled);
  REQUIRE(run_cli("fuse " + (dir / "shuffled.jsonl").string() + " --config " + config + " --out " +
                  (dir / "run2").string()) == 0);
  CHECK(read_text_file(dir / "run1/fused.csv") == read_text_file(dir / "run2/fused.csv"));

  // an empty stream cannot initialize
  write_text_file(dir / "empty.jsonl", "");
  CHECK(run_cli("fuse " + (dir / "empty.jsonl").string() + " --config " + config + " --out " +
                (dir / "run3").string()) == 3);
}

TEST_CASE("cli: noise-free simulate + fuse tracks truth through the files")
{
  const auto dir = make_temp_dir("noise_free");
  auto cfg_json = scenario_config_to_json(load_scenario_config(kScenarioDir / "stationary_60s.json"));
  cfg_json["name"] = "noise_free";
  cfg_json["motion"]["segments"][0]["duration"] = 10.0;
  cfg_json["sensors"]["ips"]["sigma_xy"] = 0.0;
  cfg_json["sensors"]["encoder"]["sigma_v"] = 0.0;
  for (const char* key : {"sigma_yaw", "sigma_vyaw", "sigma_a"}) {
    cfg_json["sensors"]["imu"][key] = 0.0;
  }
  const auto config = dir / "noise_free.json";
  write_text_file(config, cfg_json.dump());

  REQUIRE(run_cli("simulate --config " + config.string() + " --out " + dir.string()) == 0);
  REQUIRE(run_cli("fuse " + (dir / "noise_free/seed_1/measurements.jsonl").string() + " --config " +
                  config.string() + " --out " + (dir / "f").string()) == 0);

  const Trajectory truth = read_trajectory_csv(dir / "noise_free/seed_1/truth.csv");
  const Trajectory fused = read_trajectory_csv(dir / "f/fused.csv");
  double worst = 0.0;
  for (const auto& s : fused.samples) {
    const Pose2D ref = interpolate_pose(truth, s.stamp);
    worst = std::max(worst, std::hypot(s.pose.x - ref.x, s.pose.y - ref.y));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("cli: mapsim validates rate and reports counts")
{
  const auto dir = make_temp_dir("mapsim");
  const std::string config = (kScenarioDir / "sweep_2s.json").string();
  REQUIRE(run_cli("simulate --config " + config + " --out " + dir.string()) == 0);
  const std::string truth = (dir / "sweep_2s/seed_1/truth.csv").string();

  REQUIRE(run_cli("mapsim " + truth + " " + truth + " --config " + config + " --rate 2 --out " +
                  (dir / "m").string()) == 0);
  const auto stats = nlohmann::json::parse(read_text_file(dir / "m/mapstats.json"));
  CHECK(stats.at("node_count").get<int>() == 5);
  CHECK(stats.at("point_count").get<int>() > 0);

  CHECK(run_cli("mapsim " + truth + " " + truth + " --config " + config + " --rate 0") == 2);
}

TEST_CASE("cli: eval handles identity, golden fixture, and disjoint inputs")
{
  const auto dir = make_temp_dir("eval");
  const auto truth = kFixtureDir / "golden_truth.csv";
  const auto estimate = kFixtureDir / "golden_estimate.csv";

  // identical trajectories: zero ATE
  REQUIRE(run_cli("eval " + truth.string() + " " + truth.string() + " --out " + (dir / "id").string()) ==
          0);
  const auto id_report = nlohmann::json::parse(read_text_file(dir / "id/ate_report.json"));
  CHECK(id_report.at("ate").get<double>() == 0.0);

  // golden fixture generated once by the brute-force oracle
  REQUIRE(run_cli("eval " + truth.string() + " " + estimate.string() + " --out " +
                  (dir / "gold").string()) == 0);
  const auto got = nlohmann::json::parse(read_text_file(dir / "gold/ate_report.json"));
  const auto want = nlohmann::json::parse(read_text_file(kFixtureDir / "golden_ate_report.json"));
  CHECK(got.at("ate").get<double>() == doctest::Approx(want.at("ate").get<double>()).epsilon(1e-9));
  CHECK(got.at("max_error").get<double>() ==
        doctest::Approx(want.at("max_error").get<double>()).epsilon(1e-9));
  CHECK(got.at("n_pairs").get<int>() == want.at("n_pairs").get<int>());

  // disjoint time spans: no-overlap exit code
  Trajectory late = read_trajectory_csv(truth);
  for (auto& s : late.samples) s.stamp += 1000.0;
  write_trajectory_csv(dir / "late.csv", late);
  CHECK(run_cli("eval " + truth.string() + " " + (dir / "late.csv").string()) == 4);
}

TEST_CASE("cli: unknown flags and missing config are validation errors")
{
  CHECK(run_cli("simulate --config /nonexistent/config.json") == 5);
  CHECK(run_cli("simulate") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("cli: ODOMFUSE_OUT selects the output root when --out is absent")
{
  const auto dir = make_temp_dir("env_out");
  const std::string config = (kScenarioDir / "sweep_2s.json").string();
  const int status = std::system(("ODOMFUSE_OUT=" + dir.string() + " " + kCliPath +
                                  " simulate --config " + config + " > /dev/null 2>&1")
                                     .c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(std::filesystem::exists(dir / "sweep_2s/seed_1/truth.csv"));
}
