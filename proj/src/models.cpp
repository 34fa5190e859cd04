#include "slamkit/models.hpp"

#include <cmath>
#include <stdexcept>

namespace slamkit {

Pose motion_step(const Pose& pose, const ControlInput& u, double dv, double dgamma,
                 const VehicleParams& p) {
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.phi) ||
      !std::isfinite(u.v) || !std::isfinite(u.gamma) || !std::isfinite(dv) ||
      !std::isfinite(dgamma))
    throw std::domain_error("motion_step: non-finite input");

  const double v = u.v + dv;
  const double g = u.gamma + dgamma;
  const double dt = p.dt_control;

  Pose out;
  out.x = pose.x + dt * v * std::cos(pose.phi + g);
  out.y = pose.y + dt * v * std::sin(pose.phi + g);
  out.phi = wrap_angle(pose.phi + dt * v / p.wheelbase_b * std::sin(g));
  return out;
}

Pose sample_motion(const Pose& pose, const ControlInput& u, const NoiseConfig& n,
                   const VehicleParams& p, RandomStream& rng) {
  const double dv = rng.gauss(n.sigma_v);
  const double dgamma = rng.gauss(n.sigma_gamma);
  return motion_step(pose, u, dv, dgamma, p);
}

RangeBearing predict_observation(const Pose& pose, const Vec2& landmark) {
  const double dx = landmark.x - pose.x;
  const double dy = landmark.y - pose.y;
  const double range = std::hypot(dx, dy);
  if (range <= 0.0)
    throw std::domain_error("predict_observation: landmark coincides with pose");
  return {range, wrap_angle(std::atan2(dy, dx) - pose.phi)};
}

Mat2 obs_jacobian_landmark(const Pose& pose, const Vec2& lm_mean) {
  const double dx = lm_mean.x - pose.x;
  const double dy = lm_mean.y - pose.y;
  const double q = std::hypot(dx, dy);
  if (q <= 0.0)
    throw std::domain_error("obs_jacobian_landmark: zero range");
  const double q2 = q * q;
  return {dx / q, dy / q,
          -dy / q2, dx / q2};
}

InverseObservation inverse_observation(const Pose& pose, const Observation& z) {
  if (z.range <= 0.0)
    throw std::domain_error("inverse_observation: range must be positive");
  const double a = pose.phi + z.bearing;
  const double c = std::cos(a);
  const double s = std::sin(a);
  InverseObservation out;
  out.landmark = {pose.x + z.range * c, pose.y + z.range * s};
  out.jac_z = {c, -z.range * s,
               s, z.range * c};
  return out;
}

}  // namespace slamkit
