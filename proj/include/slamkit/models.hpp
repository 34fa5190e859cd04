#pragma once

#include "slamkit/core.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

/// One forward-Euler step of the bicycle kinematics at dt_control, with the
/// actuation noise (dv, dgamma) added inside the command before integration.
Pose motion_step(const Pose& pose, const ControlInput& u, double dv, double dgamma,
                 const VehicleParams& p);

/// Draws actuation noise dv ~ N(0, sigma_v^2), dgamma ~ N(0, sigma_gamma^2)
/// from `rng` and advances the pose one step.
Pose sample_motion(const Pose& pose, const ControlInput& u, const NoiseConfig& n,
                   const VehicleParams& p, RandomStream& rng);

struct RangeBearing {
  double range = 0.0;
  double bearing = 0.0;
};

/// Range and bearing from the pose to a landmark; bearing is relative to the
/// heading and wrapped to (-pi, pi].
RangeBearing predict_observation(const Pose& pose, const Vec2& landmark);

/// d(range, bearing) / d(landmark position), evaluated at (pose, lm_mean).
Mat2 obs_jacobian_landmark(const Pose& pose, const Vec2& lm_mean);

struct InverseObservation {
  Vec2 landmark;
  Mat2 jac_z;  // d(landmark) / d(range, bearing)
};

/// Maps a measurement back to the implied landmark position, together with
/// the Jacobian wrt the measurement. Used to initialize new landmarks.
InverseObservation inverse_observation(const Pose& pose, const Observation& z);

}  // namespace slamkit
