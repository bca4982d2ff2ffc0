#ifndef ODOMFUSE_SIMSENSOR_HPP_
#define ODOMFUSE_SIMSENSOR_HPP_

#include "odomfuse/core.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace odomfuse
{

// One constant-command leg of a differential-drive run.
struct MotionSegment
{
  double duration = 0.0;  // seconds, > 0
  double v = 0.0;         // linear velocity, m/s
  double w = 0.0;         // angular velocity, rad/s
};

struct MotionScript
{
  std::vector<MotionSegment> segments;

  double total_duration() const;
  // Commanded (v, w) of the segment active at time t; t past the end
  // returns the last segment's command.
  MotionSegment command_at(double t) const;
  void validate() const;
};

struct IpsConfig
{
  double rate = 10.0;      // Hz
  double sigma_xy = 0.02;  // meters
};

struct EncoderConfig
{
  double rate = 20.0;     // Hz
  double sigma_v = 0.01;  // m/s
};

struct ImuConfig
{
  double rate = 50.0;
  double sigma_yaw = 0.01;      // rad
  double sigma_vyaw = 0.02;     // rad/s
  double sigma_a = 0.1;         // m/s^2
  double yaw_drift_rate = 0.0;  // rad/s of linear yaw drift
};

struct VoConfig
{
  double rate = 1.0;                  // Hz
  double latency = 0.0;               // seconds of stamp lag
  double walk_sigma = 0.02;           // m / sqrt(s) random-walk density
  double jump_prob_per_sample = 0.08;
  double jump_sigma = 0.1;            // meters, per-axis jump magnitude
};

struct SensorSuiteConfig
{
  IpsConfig ips;
  EncoderConfig encoder;
  ImuConfig imu;
  VoConfig vo;
  std::uint64_t seed = 0;

  void validate() const;
};

// Deterministic per-stream random source. Streams are derived from the
// master seed by a fixed label, so each sensor draws an independent sequence
// regardless of sampling order. Gaussians come from an explicit Box-Muller
// transform over 53-bit uniforms, which pins the byte-exact output to the
// seed alone (no reliance on std::distribution internals).
class Rng
{
public:
  Rng(std::uint64_t master_seed, std::string_view stream_label);

  double uniform01();                    // [0, 1)
  double normal(double sigma);           // N(0, sigma^2); sigma 0 returns 0
  bool bernoulli(double p);

private:
  std::uint64_t state_;
  std::uint64_t next_u64();
};

// Exact unicycle arc step: straight-line when |w| < 1e-9, otherwise the
// closed-form circular arc of radius v/w. Yaw comes out wrapped.
Pose2D diffdrive_step(const Pose2D& pose, double v, double w, double dt);

// Integrates a motion script into a trajectory sampled every dt_sim.
// Segment boundaries land exactly; a trailing partial step pads any segment
// whose duration is not a multiple of dt_sim.
Trajectory generate_ground_truth(const MotionScript& script, double dt_sim, const Pose2D& start);

// Sensor samplers. Each samples at t = k/rate for k = 0..floor(duration*rate),
// interpolating the truth trajectory at off-grid stamps, and is deterministic
// given (truth, script, cfg.seed).
std::vector<Measurement> sample_ips(const Trajectory& truth, const SensorSuiteConfig& cfg);
std::vector<Measurement> sample_encoders(const Trajectory& truth, const MotionScript& script,
                                         const SensorSuiteConfig& cfg);
std::vector<Measurement> sample_imu(const Trajectory& truth, const MotionScript& script,
                                    const SensorSuiteConfig& cfg);

// Drifting visual-odometry baseline: truth pose plus an accumulated 2D random
// walk plus occasional permanent jump offsets, emitted at vo.rate with stamps
// lagged by vo.latency.
std::vector<Measurement> sample_vo(const Trajectory& truth, const SensorSuiteConfig& cfg);

// Sample stamps shared by all samplers: {0, 1/rate, ...} up to duration.
std::vector<double> sensor_sample_times(double duration, double rate);

}  // namespace odomfuse

#endif  // ODOMFUSE_SIMSENSOR_HPP_
