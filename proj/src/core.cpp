#include "odomfuse/core.hpp"

#include <cmath>
#include <numbers>

namespace odomfuse
{

double wrap_angle(double theta)
{
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double r = std::remainder(theta, 2.0 * std::numbers::pi);
  // remainder() lands in [-pi, pi]; fold the open edge onto +pi.
  if (r <= -std::numbers::pi) {
    r = std::numbers::pi;
  }
  return r;
}

Eigen::Vector2d body_to_world(const Eigen::Vector2d& v_body, double yaw)
{
  if (!v_body.allFinite() || !std::isfinite(yaw)) {
    throw std::invalid_argument("body_to_world: non-finite input");
  }
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {v_body.x() * c - v_body.y() * s, v_body.x() * s + v_body.y() * c};
}

Vector8d StateVector::to_vector() const
{
  Vector8d v;
  v << x, y, yaw, vx, vy, vyaw, ax, ay;
  return v;
}

StateVector StateVector::from_vector(const Vector8d& v)
{
  return {v(kIdxX), v(kIdxY), v(kIdxYaw), v(kIdxVx), v(kIdxVy), v(kIdxVyaw), v(kIdxAx), v(kIdxAy)};
}

bool StateVector::all_finite() const
{
  return to_vector().allFinite();
}

void symmetrize(Matrix8d& p)
{
  p = ((p + p.transpose()) * 0.5).eval();
}

int measurement_dim(SensorKind kind)
{
  switch (kind) {
    case SensorKind::kIpsPosition:
      return 2;
    case SensorKind::kEncoderVelocity:
      return 2;
    case SensorKind::kImuAttitude:
      return 4;
    case SensorKind::kVoPose:
      return 3;
  }
  throw std::invalid_argument("measurement_dim: unknown sensor kind");
}

const char* sensor_kind_name(SensorKind kind)
{
  switch (kind) {
    case SensorKind::kIpsPosition:
      return "ips_position";
    case SensorKind::kEncoderVelocity:
      return "encoder_velocity";
    case SensorKind::kImuAttitude:
      return "imu_attitude";
    case SensorKind::kVoPose:
      return "vo_pose";
  }
  throw std::invalid_argument("sensor_kind_name: unknown sensor kind");
}

SensorKind sensor_kind_from_name(const std::string& name)
{
  if (name == "ips_position") return SensorKind::kIpsPosition;
  if (name == "encoder_velocity") return SensorKind::kEncoderVelocity;
  if (name == "imu_attitude") return SensorKind::kImuAttitude;
  if (name == "vo_pose") return SensorKind::kVoPose;
  throw std::invalid_argument("unknown sensor kind name: " + name);
}

Measurement::Measurement(Timestamp stamp, SensorKind kind, Eigen::VectorXd value, Eigen::MatrixXd noise)
    : stamp_(stamp), kind_(kind), value_(std::move(value)), noise_(std::move(noise))
{
  const int dim = measurement_dim(kind_);
  if (value_.size() != dim) {
    throw std::invalid_argument("Measurement: value length " + std::to_string(value_.size()) +
                                " does not match kind " + sensor_kind_name(kind_));
  }
  if (noise_.rows() != dim || noise_.cols() != dim) {
    throw std::invalid_argument("Measurement: noise covariance must be " + std::to_string(dim) + "x" +
                                std::to_string(dim));
  }
  if (!std::isfinite(stamp_) || !value_.allFinite() || !noise_.allFinite()) {
    throw std::invalid_argument("Measurement: non-finite entry");
  }
  if ((noise_ - noise_.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Measurement: noise covariance not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(noise_);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("Measurement: noise covariance not positive definite");
  }
}

Pose2D interpolate_pose(const Trajectory& traj, Timestamp t)
{
  if (traj.empty()) {
    throw std::invalid_argument("interpolate_pose: empty trajectory");
  }
  const auto& s = traj.samples;
  if (t <= s.front().stamp) return s.front().pose;
  if (t >= s.back().stamp) return s.back().pose;

  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TimedPose& tp, double v) { return tp.stamp < v; });
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  const double span = hi.stamp - lo.stamp;
  if (span <= 0.0) return lo.pose;

  const double a = (t - lo.stamp) / span;
  Pose2D out;
  out.x = lo.pose.x + a * (hi.pose.x - lo.pose.x);
  out.y = lo.pose.y + a * (hi.pose.y - lo.pose.y);
  out.yaw = wrap_angle(lo.pose.yaw + a * wrap_angle(hi.pose.yaw - lo.pose.yaw));
  return out;
}

}  // namespace odomfuse
