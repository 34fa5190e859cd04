#pragma once

#include <array>
#include <span>

#include "slamkit/core.hpp"

namespace slamkit {

struct RmsePair {
  double pos = 0.0;      // meters
  double heading = 0.0;  // radians
};

/// Root-mean-square position and (wrapped) heading error over two aligned paths.
RmsePair pose_rmse(std::span<const Pose> true_path, std::span<const Pose> est_path);

/// Fraction of timesteps where every pose component error magnitude is
/// within twice its estimated standard deviation.
double two_sigma_coverage(std::span<const Pose> true_path, std::span<const Pose> est_path,
                          std::span<const std::array<double, 3>> variances);

/// Same bound checked per component, returning (x, y, phi) fractions.
std::array<double, 3> per_component_two_sigma_coverage(
    std::span<const Pose> true_path, std::span<const Pose> est_path,
    std::span<const std::array<double, 3>> variances);

struct PairedTestResult {
  double mean_diff = 0.0;
  double p_value = 1.0;
};

/// One-sided paired test of H1: mean(a - b) > 0. Uses the exact sign-flip
/// permutation distribution up to 22 pairs (deterministic, assumption-free)
/// and a normal approximation of the paired t statistic beyond that.
PairedTestResult paired_one_sided_greater(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
double sample_std(std::span<const double> xs);  // unbiased; 0 for size < 2

}  // namespace slamkit
