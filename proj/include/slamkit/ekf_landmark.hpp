#pragma once

#include "slamkit/core.hpp"
#include "slamkit/models.hpp"

namespace slamkit {

struct EkfUpdateResult {
  LandmarkEstimate estimate;  // posterior
  Vec2 innovation;            // (range residual, wrapped bearing residual)
  Mat2 innovation_cov;        // Z = G Sigma G^T + R
};

/// Initializes a landmark Gaussian from its first observation: the mean is
/// the back-projected measurement, the covariance is J R J^T with J the
/// measurement-space Jacobian of the back-projection.
LandmarkEstimate init_landmark(const Pose& pose, const Observation& z, const Mat2& r_mat);

/// EKF measurement update of one landmark conditioned on a pose sample.
/// Linearization is at (pose, prior mean); the bearing residual is wrapped
/// before applying the gain. Throws std::runtime_error when the innovation
/// covariance is numerically singular.
EkfUpdateResult update_landmark(const LandmarkEstimate& est, const Pose& pose,
                                const Observation& z, const Mat2& r_mat);

}  // namespace slamkit
