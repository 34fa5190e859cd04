#include "slamkit/ekf_landmark.hpp"

namespace slamkit {

LandmarkEstimate init_landmark(const Pose& pose, const Observation& z, const Mat2& r_mat) {
  const InverseObservation inv = inverse_observation(pose, z);
  const Mat2 cov = inv.jac_z * r_mat * inv.jac_z.transpose();
  return {inv.landmark, cov};
}

EkfUpdateResult update_landmark(const LandmarkEstimate& est, const Pose& pose,
                                const Observation& z, const Mat2& r_mat) {
  const RangeBearing zhat = predict_observation(pose, est.mean);
  const Mat2 g = obs_jacobian_landmark(pose, est.mean);
  const Mat2 innov_cov = (g * est.cov * g.transpose() + r_mat).symmetrized();
  const Mat2 innov_cov_inv = checked_spd_inverse(innov_cov);
  const Mat2 gain = est.cov * g.transpose() * innov_cov_inv;

  const Vec2 innovation{z.range - zhat.range, wrap_angle(z.bearing - zhat.bearing)};
  const Vec2 mean = est.mean + gain * innovation;
  const Mat2 cov = (Mat2::identity() - gain * g) * est.cov;

  EkfUpdateResult out;
  out.estimate = LandmarkEstimate{mean, cov};  // constructor symmetrizes
  out.innovation = innovation;
  out.innovation_cov = innov_cov;
  return out;
}

}  // namespace slamkit
