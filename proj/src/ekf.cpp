#include "odomfuse/ekf.hpp"

#include <cmath>
#include <optional>

namespace odomfuse
{

namespace
{

constexpr double kMaxConditionNumber = 1e12;
constexpr double kInitMaxStampGap = 0.5;

// Yaw rows of each measurement vector; innovations there live on the circle.
int yaw_component(SensorKind kind)
{
  switch (kind) {
    case SensorKind::kImuAttitude:
      return 0;
    case SensorKind::kVoPose:
      return 2;
    default:
      return -1;
  }
}

// State columns selected by each sensor kind, in measurement-row order.
std::vector<int> selected_columns(SensorKind kind)
{
  switch (kind) {
    case SensorKind::kIpsPosition:
      return {kIdxX, kIdxY};
    case SensorKind::kEncoderVelocity:
      return {kIdxVx, kIdxVy};
    case SensorKind::kImuAttitude:
      return {kIdxYaw, kIdxVyaw, kIdxAx, kIdxAy};
    case SensorKind::kVoPose:
      return {kIdxX, kIdxY, kIdxYaw};
  }
  throw std::invalid_argument("selected_columns: unknown sensor kind");
}

}  // namespace

void FilterConfig::validate() const
{
  if (gating_threshold < 0.0) {
    throw std::invalid_argument("FilterConfig: gating_threshold must be >= 0");
  }
  if (min_dt < 0.0) {
    throw std::invalid_argument("FilterConfig: min_dt must be >= 0");
  }
  if ((process_noise.q_diag.array() < 0.0).any()) {
    throw std::invalid_argument("FilterConfig: process noise densities must be >= 0");
  }
  if ((initial_covariance_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("FilterConfig: initial covariance diagonal must be > 0");
  }
}

StateVector motion_model(const StateVector& state, double dt)
{
  if (dt < 0.0) {
    throw std::invalid_argument("motion_model: negative dt");
  }
  const double c = std::cos(state.yaw);
  const double s = std::sin(state.yaw);
  const double dx_body = state.vx * dt + 0.5 * state.ax * dt * dt;
  const double dy_body = state.vy * dt + 0.5 * state.ay * dt * dt;

  StateVector out = state;
  out.x = state.x + c * dx_body - s * dy_body;
  out.y = state.y + s * dx_body + c * dy_body;
  out.yaw = wrap_angle(state.yaw + state.vyaw * dt);
  out.vx = state.vx + state.ax * dt;
  out.vy = state.vy + state.ay * dt;
  return out;
}

Matrix8d motion_jacobian(const StateVector& state, double dt)
{
  if (dt < 0.0) {
    throw std::invalid_argument("motion_jacobian: negative dt");
  }
  const double c = std::cos(state.yaw);
  const double s = std::sin(state.yaw);
  const double dx_body = state.vx * dt + 0.5 * state.ax * dt * dt;
  const double dy_body = state.vy * dt + 0.5 * state.ay * dt * dt;
  const double half_dt2 = 0.5 * dt * dt;

  Matrix8d f = Matrix8d::Identity();
  f(kIdxX, kIdxYaw) = -s * dx_body - c * dy_body;
  f(kIdxX, kIdxVx) = c * dt;
  f(kIdxX, kIdxVy) = -s * dt;
  f(kIdxX, kIdxAx) = c * half_dt2;
  f(kIdxX, kIdxAy) = -s * half_dt2;

  f(kIdxY, kIdxYaw) = c * dx_body - s * dy_body;
  f(kIdxY, kIdxVx) = s * dt;
  f(kIdxY, kIdxVy) = c * dt;
  f(kIdxY, kIdxAx) = s * half_dt2;
  f(kIdxY, kIdxAy) = c * half_dt2;

  f(kIdxYaw, kIdxVyaw) = dt;
  f(kIdxVx, kIdxAx) = dt;
  f(kIdxVy, kIdxAy) = dt;
  return f;
}

StateEstimate predict(const StateEstimate& est, Timestamp to_stamp, const FilterConfig& cfg)
{
  const double dt = to_stamp - est.stamp;
  if (dt < 0.0) {
    throw OutOfOrderError("predict: target stamp precedes estimate");
  }

  StateEstimate out = est;
  out.stamp = to_stamp;
  if (dt < cfg.min_dt) {
    return out;
  }

  out.state = motion_model(est.state, dt);
  const Matrix8d f = motion_jacobian(est.state, dt);
  const Matrix8d q = (cfg.process_noise.q_diag * dt).asDiagonal();
  out.covariance = f * est.covariance * f.transpose() + q;
  symmetrize(out.covariance);
  return out;
}

Eigen::VectorXd measurement_model(SensorKind kind, const StateVector& state)
{
  const Vector8d x = state.to_vector();
  const auto cols = selected_columns(kind);
  Eigen::VectorXd z(static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    z(static_cast<int>(i)) = x(cols[i]);
  }
  return z;
}

Eigen::MatrixXd measurement_jacobian(SensorKind kind)
{
  const auto cols = selected_columns(kind);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<int>(cols.size()), kStateSize);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    h(static_cast<int>(i), cols[i]) = 1.0;
  }
  return h;
}

UpdateResult update(const StateEstimate& est, const Measurement& m, const FilterConfig& cfg)
{
  if (std::abs(m.stamp() - est.stamp) > std::max(cfg.min_dt, 1e-12)) {
    throw ContractViolation("update: measurement stamp does not match estimate; predict first");
  }

  const Eigen::MatrixXd h = measurement_jacobian(m.kind());
  Eigen::VectorXd innovation = m.value() - measurement_model(m.kind(), est.state);
  const int yaw_row = yaw_component(m.kind());
  if (yaw_row >= 0) {
    innovation(yaw_row) = wrap_angle(innovation(yaw_row));
  }

  const Eigen::MatrixXd s = h * est.covariance * h.transpose() + m.noise();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > kMaxConditionNumber) {
    throw NumericalError("update: innovation covariance is numerically singular");
  }

  const Eigen::LDLT<Eigen::MatrixXd> s_ldlt(s);
  if (cfg.gating_threshold > 0.0) {
    const double maha2 = innovation.dot(s_ldlt.solve(innovation));
    if (maha2 > cfg.gating_threshold) {
      return {est, false};
    }
  }

  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::MatrixXd gain = s_ldlt.solve(h * est.covariance).transpose();

  UpdateResult out;
  out.accepted = true;
  out.estimate.stamp = est.stamp;

  Vector8d x = est.state.to_vector() + gain * innovation;
  x(kIdxYaw) = wrap_angle(x(kIdxYaw));
  out.estimate.state = StateVector::from_vector(x);

  out.estimate.covariance = (Matrix8d::Identity() - gain * h) * est.covariance;
  symmetrize(out.estimate.covariance);
  return out;
}

StateEstimate initialize(const Measurement& first_fix, const Measurement& first_att, const FilterConfig& cfg)
{
  if (first_fix.kind() != SensorKind::kIpsPosition || first_att.kind() != SensorKind::kImuAttitude) {
    throw std::invalid_argument("initialize: expects an IPS fix and an IMU attitude");
  }
  if (std::abs(first_fix.stamp() - first_att.stamp()) > kInitMaxStampGap) {
    throw InitializationError("initialize: fix/attitude stamp gap exceeds 0.5 s");
  }

  StateEstimate est;
  est.state.x = first_fix.value()(0);
  est.state.y = first_fix.value()(1);
  est.state.yaw = wrap_angle(first_att.value()(0));
  est.state.vx = 0.0;
  est.state.vy = 0.0;
  est.state.vyaw = first_att.value()(1);
  est.state.ax = first_att.value()(2);
  est.state.ay = first_att.value()(3);
  est.covariance = cfg.initial_covariance_diag.asDiagonal();
  est.stamp = std::max(first_fix.stamp(), first_att.stamp());
  return est;
}

FusionResult process_stream(std::span<const Measurement> measurements, const FilterConfig& cfg)
{
  cfg.validate();

  FusionResult result;
  std::optional<Measurement> pending_fix;
  std::optional<Measurement> pending_att;
  std::optional<StateEstimate> est;

  auto emit = [&result](const StateEstimate& e) {
    result.estimates.push_back(e);
    result.trajectory.samples.push_back({e.stamp, e.state.pose()});
  };

  for (const Measurement& m : measurements) {
    if (!est) {
      if (m.kind() == SensorKind::kIpsPosition) {
        pending_fix = m;
      } else if (m.kind() == SensorKind::kImuAttitude) {
        pending_att = m;
      }
      if (pending_fix && pending_att &&
          std::abs(pending_fix->stamp() - pending_att->stamp()) <= kInitMaxStampGap) {
        est = initialize(*pending_fix, *pending_att, cfg);
        result.initialized_at = est->stamp;
        result.processed += 1;
        emit(*est);
      } else {
        result.skipped_before_init += 1;
      }
      continue;
    }

    if (m.stamp() < est->stamp) {
      result.dropped_out_of_order += 1;
      continue;
    }

    const StateEstimate predicted = predict(*est, m.stamp(), cfg);
    UpdateResult upd = update(predicted, m, cfg);
    if (!upd.accepted) {
      result.rejected_by_gate += 1;
    }
    est = upd.estimate;
    result.processed += 1;
    emit(*est);
  }

  if (!est) {
    throw InitializationError("process_stream: stream ended before an IPS/IMU initialization pair");
  }
  return result;
}

}  // namespace odomfuse
