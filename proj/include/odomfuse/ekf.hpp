#ifndef ODOMFUSE_EKF_HPP_
#define ODOMFUSE_EKF_HPP_

#include "odomfuse/core.hpp"

#include <span>
#include <vector>

namespace odomfuse
{

// Per-state process noise spectral densities. Realized as Q = diag(q_diag) * dt
// at each prediction, so entries are (state unit)^2 per second.
struct ProcessNoiseModel
{
  Vector8d q_diag = (Vector8d() << 1e-4, 1e-4, 1e-4, 1e-2, 1e-2, 1e-2, 1e-1, 1e-1).finished();
};

struct FilterConfig
{
  ProcessNoiseModel process_noise;
  // Mahalanobis distance^2 above which an update is rejected; 0 disables gating.
  double gating_threshold = 0.0;
  // Position/yaw entries sized to the default IPS/IMU noise the filter
  // initializes from; velocities and accelerations start uninformed.
  Vector8d initial_covariance_diag = (Vector8d() << 4e-4, 4e-4, 1e-4, 0.25, 0.25, 0.25, 1.0, 1.0).finished();
  // Prediction intervals below this floor only advance the stamp.
  double min_dt = 1e-6;

  void validate() const;
};

// The filter's belief at one instant: state, covariance, timestamp.
struct StateEstimate
{
  StateVector state;
  Matrix8d covariance = Matrix8d::Identity();
  Timestamp stamp = 0.0;
};

// Constant-acceleration planar motion model. Position advances by the
// world-frame rotation of the body displacement (v*dt + a*dt^2/2), yaw by
// vyaw*dt (wrapped); body velocities by a*dt; vyaw, ax, ay stay constant.
StateVector motion_model(const StateVector& state, double dt);

// Analytic Jacobian of motion_model with respect to the state, rows/columns
// in StateIndex order.
Matrix8d motion_jacobian(const StateVector& state, double dt);

// Propagates an estimate to a later stamp: x = f(x), P = F P F^T + Q, then
// re-symmetrized. If the interval is below cfg.min_dt only the stamp moves.
// Throws OutOfOrderError when to_stamp precedes the estimate.
StateEstimate predict(const StateEstimate& est, Timestamp to_stamp, const FilterConfig& cfg);

// Expected measurement h(x) for a sensor kind. All four models are pure
// state-component selections.
Eigen::VectorXd measurement_model(SensorKind kind, const StateVector& state);

// Measurement Jacobian H for a sensor kind: a constant 0/1 selection matrix,
// one 1 per row.
Eigen::MatrixXd measurement_jacobian(SensorKind kind);

struct UpdateResult
{
  StateEstimate estimate;
  // False when the innovation failed the Mahalanobis gate and the
  // estimate was returned unchanged.
  bool accepted = true;
};

// Kalman update: K = P H^T S^-1, x += K * nu, P = (I - K H) P re-symmetrized.
// Yaw components of the innovation are angle-wrapped. The measurement stamp
// must match the estimate stamp to within cfg.min_dt (predict first).
// Throws NumericalError when S is singular beyond condition 1e12.
UpdateResult update(const StateEstimate& est, const Measurement& m, const FilterConfig& cfg);

// Builds the initial estimate from the first position fix and the first
// attitude measurement. Their stamps must agree to within 0.5 s.
StateEstimate initialize(const Measurement& first_fix, const Measurement& first_att, const FilterConfig& cfg);

// Outcome of fusing a full measurement stream.
struct FusionResult
{
  std::vector<StateEstimate> estimates;  // one per processed measurement
  Trajectory trajectory;                 // pose view of the estimate log
  std::size_t processed = 0;             // measurements folded into the state
  std::size_t dropped_out_of_order = 0;  // stamps behind the current estimate
  std::size_t rejected_by_gate = 0;      // failed the Mahalanobis gate
  std::size_t skipped_before_init = 0;   // consumed while waiting for the init pair
  Timestamp initialized_at = 0.0;
};

// Fuses a time-ordered measurement stream into a trajectory. Waits for an
// IPS fix / IMU attitude pair to initialize, then predicts and updates per
// measurement. Out-of-order measurements are dropped and counted, not fatal.
// Throws InitializationError if the stream ends before initialization.
FusionResult process_stream(std::span<const Measurement> measurements, const FilterConfig& cfg);

}  // namespace odomfuse

#endif  // ODOMFUSE_EKF_HPP_
