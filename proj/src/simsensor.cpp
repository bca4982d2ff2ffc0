#include "odomfuse/simsensor.hpp"

#include <cmath>
#include <numbers>

namespace odomfuse
{

namespace
{

// Variance floor keeping sampled noise covariances positive definite even
// in noise-free configurations.
constexpr double kMinVariance = 1e-12;
// Nominal VO yaw variance attached to VoPose measurements.
constexpr double kVoYawVariance = 1e-4;

double floored(double variance)
{
  return std::max(variance, kMinVariance);
}

Eigen::MatrixXd diag2(double v0, double v1)
{
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = v0;
  m(1, 1) = v1;
  return m;
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

double MotionScript::total_duration() const
{
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

MotionSegment MotionScript::command_at(double t) const
{
  double start = 0.0;
  for (const auto& seg : segments) {
    if (t < start + seg.duration) return seg;
    start += seg.duration;
  }
  return segments.back();
}

void MotionScript::validate() const
{
  if (segments.empty()) {
    throw std::invalid_argument("MotionScript: empty script");
  }
  for (const auto& seg : segments) {
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
      throw std::invalid_argument("MotionScript: segment durations must be positive and finite");
    }
    if (!std::isfinite(seg.v) || !std::isfinite(seg.w)) {
      throw std::invalid_argument("MotionScript: non-finite segment command");
    }
  }
}

void SensorSuiteConfig::validate() const
{
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SensorSuiteConfig: ") + what);
  };
  require(ips.rate > 0.0, "ips.rate must be > 0");
  require(encoder.rate > 0.0, "encoder.rate must be > 0");
  require(imu.rate > 0.0, "imu.rate must be > 0");
  require(vo.rate > 0.0, "vo.rate must be > 0");
  require(ips.sigma_xy >= 0.0, "ips.sigma_xy must be >= 0");
  require(encoder.sigma_v >= 0.0, "encoder.sigma_v must be >= 0");
  require(imu.sigma_yaw >= 0.0 && imu.sigma_vyaw >= 0.0 && imu.sigma_a >= 0.0,
          "imu sigmas must be >= 0");
  require(vo.walk_sigma >= 0.0 && vo.jump_sigma >= 0.0, "vo sigmas must be >= 0");
  require(vo.jump_prob_per_sample >= 0.0 && vo.jump_prob_per_sample <= 1.0,
          "vo.jump_prob_per_sample must be in [0, 1]");
  require(vo.latency >= 0.0, "vo.latency must be >= 0");
}

Rng::Rng(std::uint64_t master_seed, std::string_view stream_label)
    : state_(master_seed * 0x9E3779B97F4A7C15ull ^ fnv1a64(stream_label))
{
}

std::uint64_t Rng::next_u64()
{
  // splitmix64; pure 64-bit arithmetic, identical on every platform.
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform01()
{
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double sigma)
{
  // Box-Muller; u1 shifted into (0, 1] so the log stays finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool Rng::bernoulli(double p)
{
  return uniform01() < p;
}

Pose2D diffdrive_step(const Pose2D& pose, double v, double w, double dt)
{
  if (dt < 0.0) {
    throw std::invalid_argument("diffdrive_step: negative dt");
  }
  Pose2D out;
  if (std::abs(w) < 1e-9) {
    out.x = pose.x + v * std::cos(pose.yaw) * dt;
    out.y = pose.y + v * std::sin(pose.yaw) * dt;
    out.yaw = wrap_angle(pose.yaw + w * dt);
    return out;
  }
  const double r = v / w;
  out.x = pose.x + r * (std::sin(pose.yaw + w * dt) - std::sin(pose.yaw));
  out.y = pose.y - r * (std::cos(pose.yaw + w * dt) - std::cos(pose.yaw));
  out.yaw = wrap_angle(pose.yaw + w * dt);
  return out;
}

Trajectory generate_ground_truth(const MotionScript& script, double dt_sim, const Pose2D& start)
{
  script.validate();
  if (!(dt_sim > 0.0)) {
    throw std::invalid_argument("generate_ground_truth: dt_sim must be > 0");
  }

  Trajectory traj;
  Pose2D pose = start;
  double segment_start = 0.0;
  traj.samples.push_back({0.0, pose});

  for (const auto& seg : script.segments) {
    const auto full_steps = static_cast<std::size_t>(std::floor(seg.duration / dt_sim + 1e-9));
    for (std::size_t i = 1; i <= full_steps; ++i) {
      pose = diffdrive_step(pose, seg.v, seg.w, dt_sim);
      traj.samples.push_back({segment_start + static_cast<double>(i) * dt_sim, pose});
    }
    const double remainder = seg.duration - static_cast<double>(full_steps) * dt_sim;
    if (remainder > 1e-9) {
      // Pad so the segment boundary lands exactly.
      pose = diffdrive_step(pose, seg.v, seg.w, remainder);
      traj.samples.push_back({segment_start + seg.duration, pose});
    }
    segment_start += seg.duration;
  }
  return traj;
}

std::vector<double> sensor_sample_times(double duration, double rate)
{
  if (!(rate > 0.0)) {
    throw std::invalid_argument("sensor_sample_times: rate must be > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
  std::vector<double> times;
  times.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    times.push_back(static_cast<double>(k) / rate);
  }
  return times;
}

std::vector<Measurement> sample_ips(const Trajectory& truth, const SensorSuiteConfig& cfg)
{
  if (truth.empty()) {
    throw std::invalid_argument("sample_ips: empty truth trajectory");
  }
  cfg.validate();
  Rng rng(cfg.seed, "ips");
  const double var = floored(cfg.ips.sigma_xy * cfg.ips.sigma_xy);

  std::vector<Measurement> out;
  for (double t : sensor_sample_times(truth.end_stamp(), cfg.ips.rate)) {
    const Pose2D pose = interpolate_pose(truth, t);
    Eigen::VectorXd z(2);
    z << pose.x + rng.normal(cfg.ips.sigma_xy), pose.y + rng.normal(cfg.ips.sigma_xy);
    out.emplace_back(t, SensorKind::kIpsPosition, z, diag2(var, var));
  }
  return out;
}

std::vector<Measurement> sample_encoders(const Trajectory& truth, const MotionScript& script,
                                         const SensorSuiteConfig& cfg)
{
  if (truth.empty()) {
    throw std::invalid_argument("sample_encoders: empty truth trajectory");
  }
  cfg.validate();
  script.validate();
  Rng rng(cfg.seed, "encoder");
  const double var = floored(cfg.encoder.sigma_v * cfg.encoder.sigma_v);

  std::vector<Measurement> out;
  for (double t : sensor_sample_times(truth.end_stamp(), cfg.encoder.rate)) {
    const MotionSegment cmd = script.command_at(t);
    Eigen::VectorXd z(2);
    // Differential drive: body-frame vy is identically zero in truth.
    z << cmd.v + rng.normal(cfg.encoder.sigma_v), rng.normal(cfg.encoder.sigma_v);
    out.emplace_back(t, SensorKind::kEncoderVelocity, z, diag2(var, var));
  }
  return out;
}

std::vector<Measurement> sample_imu(const Trajectory& truth, const MotionScript& script,
                                    const SensorSuiteConfig& cfg)
{
  if (truth.empty()) {
    throw std::invalid_argument("sample_imu: empty truth trajectory");
  }
  cfg.validate();
  script.validate();
  Rng rng(cfg.seed, "imu");

  const double var_yaw = floored(cfg.imu.sigma_yaw * cfg.imu.sigma_yaw);
  const double var_vyaw = floored(cfg.imu.sigma_vyaw * cfg.imu.sigma_vyaw);
  const double var_a = floored(cfg.imu.sigma_a * cfg.imu.sigma_a);
  const double h = 1.0 / cfg.imu.rate;

  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(4, 4);
  noise.diagonal() << var_yaw, var_vyaw, var_a, var_a;

  std::vector<Measurement> out;
  for (double t : sensor_sample_times(truth.end_stamp(), cfg.imu.rate)) {
    const Pose2D pose = interpolate_pose(truth, t);
    const MotionSegment cmd = script.command_at(t);
    const MotionSegment prev = script.command_at(std::max(t - h, 0.0));

    const double yaw = wrap_angle(pose.yaw + cfg.imu.yaw_drift_rate * t + rng.normal(cfg.imu.sigma_yaw));
    const double vyaw = cmd.w + rng.normal(cfg.imu.sigma_vyaw);
    // Longitudinal accel from backward-differenced body velocity; lateral
    // accel is the centripetal term (body vy is constant zero).
    const double ax = (cmd.v - prev.v) / h + rng.normal(cfg.imu.sigma_a);
    const double ay = cmd.v * cmd.w + rng.normal(cfg.imu.sigma_a);

    Eigen::VectorXd z(4);
    z << yaw, vyaw, ax, ay;
    out.emplace_back(t, SensorKind::kImuAttitude, z, noise);
  }
  return out;
}

std::vector<Measurement> sample_vo(const Trajectory& truth, const SensorSuiteConfig& cfg)
{
  if (truth.empty()) {
    throw std::invalid_argument("sample_vo: empty truth trajectory");
  }
  cfg.validate();
  Rng rng(cfg.seed, "vo");

  const double dt = 1.0 / cfg.vo.rate;
  const double step_sigma = cfg.vo.walk_sigma * std::sqrt(dt);
  const double var_xy =
      floored(step_sigma * step_sigma + cfg.vo.jump_prob_per_sample * cfg.vo.jump_sigma * cfg.vo.jump_sigma);

  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(3, 3);
  noise.diagonal() << var_xy, var_xy, kVoYawVariance;

  Eigen::Vector2d walk = Eigen::Vector2d::Zero();
  bool first = true;

  std::vector<Measurement> out;
  for (double t : sensor_sample_times(truth.end_stamp(), cfg.vo.rate)) {
    if (!first) {
      walk.x() += rng.normal(step_sigma);
      walk.y() += rng.normal(step_sigma);
      if (rng.bernoulli(cfg.vo.jump_prob_per_sample)) {
        walk.x() += rng.normal(cfg.vo.jump_sigma);
        walk.y() += rng.normal(cfg.vo.jump_sigma);
      }
    }
    first = false;

    const Pose2D pose = interpolate_pose(truth, t);
    Eigen::VectorXd z(3);
    z << pose.x + walk.x(), pose.y + walk.y(), pose.yaw;
    out.emplace_back(t + cfg.vo.latency, SensorKind::kVoPose, z, noise);
  }
  return out;
}

}  // namespace odomfuse
