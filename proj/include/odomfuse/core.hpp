#ifndef ODOMFUSE_CORE_HPP_
#define ODOMFUSE_CORE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace odomfuse
{

// Timestamps are seconds since scenario start (not wall clock), so runs
// are reproducible. Kept as a plain double: all arithmetic on stamps is
// ordinary real arithmetic.
using Timestamp = double;

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;

// State vector component indices, used when building Jacobians and
// selection matrices. Order is fixed across the whole library and the
// on-disk formats.
enum StateIndex : int
{
  kIdxX = 0,
  kIdxY = 1,
  kIdxYaw = 2,
  kIdxVx = 3,
  kIdxVy = 4,
  kIdxVyaw = 5,
  kIdxAx = 6,
  kIdxAy = 7,
  kStateSize = 8
};

// Thrown when a matrix inversion or conditioning check fails inside the filter.
struct NumericalError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Thrown when a measurement stream cannot produce an initial state.
struct InitializationError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Thrown when trajectory association produces zero pairs.
struct NoOverlapError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Thrown when an operation is asked to step backwards in time.
struct OutOfOrderError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Thrown when a caller violates an API contract (e.g. updating with a
// measurement whose stamp does not match the estimate).
struct ContractViolation : std::logic_error
{
  using std::logic_error::logic_error;
};

// Normalizes an angle to the half-open interval (-pi, pi].
// Throws std::invalid_argument on non-finite input.
double wrap_angle(double theta);

// Rotates a body-frame 2-vector into the world frame by the given yaw.
Eigen::Vector2d body_to_world(const Eigen::Vector2d& v_body, double yaw);

// Planar pose. Yaw is radians, counter-clockwise positive, kept in (-pi, pi].
struct Pose2D
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
};

// Full fused kinematic state. Velocities and accelerations are body-frame
// (longitudinal x, lateral y); position and yaw are world-frame.
struct StateVector
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double vyaw = 0.0;
  double ax = 0.0;
  double ay = 0.0;

  Vector8d to_vector() const;
  static StateVector from_vector(const Vector8d& v);

  Pose2D pose() const { return {x, y, yaw}; }
  bool all_finite() const;
};

// Re-symmetrizes a covariance in place: P <- (P + P^T) / 2.
void symmetrize(Matrix8d& p);

// Sensor channels the filter understands.
enum class SensorKind
{
  kIpsPosition,      // absolute position fix [x, y], world frame
  kEncoderVelocity,  // body-frame velocity [vx, vy]
  kImuAttitude,      // [yaw, vyaw, ax, ay]
  kVoPose            // visual-odometry pose [x, y, yaw], world frame
};

// Measurement vector length for each sensor kind.
int measurement_dim(SensorKind kind);

// Stable wire-format name ("ips_position", ...) and its inverse.
const char* sensor_kind_name(SensorKind kind);
SensorKind sensor_kind_from_name(const std::string& name);

// A timestamped sensor observation with its noise covariance. Construction
// validates that the value length matches the kind and that the noise matrix
// is symmetric positive definite.
class Measurement
{
public:
  Measurement(Timestamp stamp, SensorKind kind, Eigen::VectorXd value, Eigen::MatrixXd noise);

  Timestamp stamp() const { return stamp_; }
  SensorKind kind() const { return kind_; }
  const Eigen::VectorXd& value() const { return value_; }
  const Eigen::MatrixXd& noise() const { return noise_; }

private:
  Timestamp stamp_;
  SensorKind kind_;
  Eigen::VectorXd value_;
  Eigen::MatrixXd noise_;
};

struct TimedPose
{
  Timestamp stamp = 0.0;
  Pose2D pose;
};

// Time-ordered sequence of planar poses. Ground-truth trajectories from the
// simulator are uniformly spaced; fused/estimated trajectories follow the
// measurement cadence and may repeat stamps when sensors coincide.
struct Trajectory
{
  std::vector<TimedPose> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  Timestamp start_stamp() const { return samples.front().stamp; }
  Timestamp end_stamp() const { return samples.back().stamp; }
};

// Pose at time t, linearly interpolated between bracketing samples (yaw along
// the shorter arc). t is clamped to the trajectory's time span.
Pose2D interpolate_pose(const Trajectory& traj, Timestamp t);

}  // namespace odomfuse

#endif  // ODOMFUSE_CORE_HPP_
